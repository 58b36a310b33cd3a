// Compares the serial reference replication runner with the OpenMP runner on
// the two simulation kernels, and checks the results agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "htg/experiments.hpp"
#include "htg/mcp_sim.hpp"
#include "htg/queue_sim.hpp"
#include "htg/replication.hpp"

using namespace htg;
namespace chrono = std::chrono;

namespace {

template <class F>
double time_ms(F&& fn) {
  const auto t0 = chrono::steady_clock::now();
  fn();
  const auto t1 = chrono::steady_clock::now();
  return chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t reps = 400;
  if (argc > 1) reps = static_cast<std::size_t>(std::atoll(argv[1]));

  const auto cls = UncertaintyClass::from_points(1.0, {{1.0, 0.25}, {0.0, 0.5}});
  const auto sol = solve_hjb({cls});
  const auto system = SystemConfig::make(400, {cls}, {1.0}, 25.0, 7);
  const auto adversary = feedback_adversary(sol, {cls});

  auto queue_body = [&](std::size_t, Rng& rng) {
    return simulate(system, adversary, Scheduler::cmu, rng, RecordMode::summary)
        .discounted_cost;
  };

  std::vector<double> serial_out, parallel_out;
  const double t_serial =
      time_ms([&] { serial_out = run_replications_serial(reps, 7, queue_body); });
  const double t_parallel =
      time_ms([&] { parallel_out = run_replications(reps, 7, queue_body); });
  const bool queue_match = serial_out == parallel_out;

  McpOptions mopts;
  auto mcp_serial = [&] {
    FeedbackPolicy policy(std::make_shared<HJBSolution>(sol), {cls});
    auto spec = optimal_diffusion(policy, 0.0, mopts);
    return run_replications_serial(reps, 9, [&](std::size_t, Rng& rng) {
      return euler_reflected(spec, rng).discounted_integral;
    });
  };
  std::vector<double> mcp_out;
  const double t_mcp_serial = time_ms([&] { mcp_out = mcp_serial(); });
  EstimateSummary mcp_parallel;
  const double t_mcp_parallel = time_ms([&] {
    mcp_parallel = estimate_mcp_value(sol, {cls}, 0.0, reps, 9, mopts);
  });

  std::printf("replications: %zu\n", reps);
  std::printf("%-28s %10.1f ms\n", "queue sim, serial", t_serial);
  std::printf("%-28s %10.1f ms  (results %s)\n", "queue sim, OpenMP", t_parallel,
              queue_match ? "identical" : "DIFFER");
  std::printf("%-28s %10.1f ms\n", "euler sim, serial", t_mcp_serial);
  std::printf("%-28s %10.1f ms  (mean %.6f +- %.6f)\n", "euler sim, OpenMP",
              t_mcp_parallel, mcp_parallel.mean, mcp_parallel.ci95);
  return queue_match ? 0 : 1;
}
