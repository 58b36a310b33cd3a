#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "htg/errors.hpp"
#include "htg/queue_sim.hpp"
#include "htg/reflection.hpp"

using namespace htg;

namespace {

SystemConfig one_type(long n, double T = 25.0, std::uint64_t seed = 1) {
  auto cls = UncertaintyClass::from_points(1.0, {{0.0, 0.5}});
  return SystemConfig::make(n, {cls}, {1.0}, T, seed);
}

AdversaryPolicy constant_jobs(double size, std::size_t L = 1) {
  std::vector<JobDistribution> laws(L, JobDistribution::two_point(size, 0.0));
  return AdversaryPolicy::static_laws(std::move(laws));
}

}  // namespace

TEST_CASE("config normalization sorts by h*mu and rescales") {
  auto a = UncertaintyClass::from_points(2.0, {{0.0, 0.25}});
  auto b = UncertaintyClass::from_points(2.0, {{0.5, 0.25}});
  // given out of order: h*mu = (4, 1) must become (1, 4) after sorting
  auto cfg = SystemConfig::make(100, {a, b}, {2.0, 0.5}, 10.0, 1);
  CHECK(cfg.classes[0].points()[0].b == 0.5);
  CHECK(cfg.h[0] * cfg.classes[0].mu() == doctest::Approx(1.0));
  CHECK(cfg.h[1] * cfg.classes[1].mu() == doctest::Approx(4.0));

  const std::vector<UncertaintyClass> unbalanced{a};  // sum 1/mu = 0.5
  const std::vector<double> h1{1.0};
  CHECK_THROWS_AS(SystemConfig::make(100, unbalanced, h1, 10.0, 1), ConfigError);
  const std::vector<UncertaintyClass> ok{a, b};
  const std::vector<double> h2{1.0, 1.0};
  CHECK_THROWS_AS(SystemConfig::make(100, ok, h2, -1.0, 1), ConfigError);
}

TEST_CASE("empty system: zero-size jobs leave nothing behind") {
  const long n = 100;
  const double T = 4.0;
  auto cfg = one_type(n, T);
  Rng rng = make_stream(1, 0);
  auto stats = simulate(cfg, constant_jobs(0.0), Scheduler::cmu, rng);

  CHECK(stats.discounted_cost == 0.0);
  for (std::size_t k = 0; k < stats.t.size(); ++k) {
    CHECK(stats.w_hat_tot[k] == 0.0);
    CHECK(stats.q_hat[0][k] == 0.0);
    CHECK(stats.w_hat[0][k] == 0.0);
  }
  CHECK(stats.r_hat.back() ==
        doctest::Approx(std::sqrt(double(n)) * T).epsilon(1e-12));
  CHECK(rsp_gap(stats)[0] == 0.0);
}

TEST_CASE("deterministic unit jobs at n = 1: the sawtooth path") {
  auto cfg = one_type(1, 3.0);
  Rng rng = make_stream(1, 0);
  auto stats = simulate(cfg, constant_jobs(1.0), Scheduler::cmu, rng);

  // cost = int_1^3 e^-t dt
  CHECK(stats.discounted_cost ==
        doctest::Approx(std::exp(-1.0) - std::exp(-3.0)).epsilon(1e-12));
  // workload and queue at epochs 1..3 equal 1; the pre-arrival path is 0
  for (std::size_t k = 1; k < stats.t.size(); ++k) {
    CHECK(stats.w_hat_tot[k] == 1.0);
    CHECK(stats.q_hat[0][k] == 1.0);
    CHECK(stats.w_hat_tot_pre[k] == 0.0);
  }
  CHECK(rsp_gap(stats)[0] == 0.0);  // Q = mu W along the whole path
  CHECK(high_priority_workload(stats) == 0.0);
}

TEST_CASE("pre-arrival workload equals the iterated one-step reflection") {
  auto cls = UncertaintyClass::from_points(1.0, {{0.3, 0.5}});
  auto cfg = SystemConfig::make(50, {cls}, {1.0}, 8.0, 21);
  auto adversary = AdversaryPolicy::static_points({{0.3, 0.5}});
  Rng rng = make_stream(21, 0);
  auto stats = simulate(cfg, adversary, Scheduler::cmu, rng);

  const double root_n = std::sqrt(50.0);
  double w = 0.0;
  for (std::size_t k = 1; k < stats.t.size(); ++k) {
    w = lindley_step(w, (stats.j_tot[k] - 1.0) / root_n).w_next;
    CHECK(std::abs(w - stats.w_hat_tot_pre[k]) <= 1e-9);
    // post-arrival value is the previous pre-arrival one plus the fresh work
    CHECK(stats.w_hat_tot[k] ==
          doctest::Approx(stats.w_hat_tot_pre[k - 1] + stats.j_tot[k] / root_n)
              .epsilon(1e-12));
  }
}

TEST_CASE("work conservation: idleness grows only at zero workload") {
  auto cfg = one_type(50, 10.0, 5);
  auto adversary = AdversaryPolicy::static_points({{0.0, 0.5}});
  Rng rng = make_stream(5, 0);
  auto stats = simulate(cfg, adversary, Scheduler::cmu, rng);

  bool saw_idle = false;
  for (std::size_t k = 1; k < stats.t.size(); ++k) {
    CHECK(stats.r_hat[k] >= stats.r_hat[k - 1]);
    if (stats.r_hat[k] > stats.r_hat[k - 1]) {
      // the server idled inside [(k-1)/n, k/n), so the workload hit zero there
      CHECK(stats.w_hat_tot_pre[k - 1] == 0.0);
      saw_idle = true;
    }
  }
  CHECK(saw_idle);  // with zero drift the queue does empty now and then
}

TEST_CASE("total workload is scheduler-invariant pathwise") {
  auto a = UncertaintyClass::from_points(2.0, {{0.0, 0.25}});
  auto b = UncertaintyClass::from_points(2.0, {{0.3, 0.4}});
  auto cfg = SystemConfig::make(64, {a, b}, {0.5, 1.0}, 6.0, 3);
  auto adversary = AdversaryPolicy::static_points({{0.0, 0.25}, {0.3, 0.4}});

  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng r1 = make_stream(3, rep);
    Rng r2 = make_stream(3, rep);
    auto s_cmu = simulate(cfg, adversary, Scheduler::cmu, r1);
    auto s_fifo = simulate(cfg, adversary, Scheduler::fifo_global, r2);
    double dev = 0.0;
    for (std::size_t k = 0; k < s_cmu.t.size(); ++k)
      dev = std::max(dev, std::abs(s_cmu.w_hat_tot[k] - s_fifo.w_hat_tot[k]));
    CHECK(dev <= 1e-9);
  }
}

TEST_CASE("causality: a longer run extends a shorter one unchanged") {
  auto cls = UncertaintyClass::from_points(1.0, {{1.0, 0.25}, {0.0, 0.5}});
  auto sol = solve_hjb({cls});
  auto adversary = feedback_adversary(sol, {cls});
  auto cfg_short = SystemConfig::make(40, {cls}, {1.0}, 3.0, 9);
  auto cfg_long = SystemConfig::make(40, {cls}, {1.0}, 6.0, 9);

  Rng r1 = make_stream(9, 0);
  Rng r2 = make_stream(9, 0);
  auto s_short = simulate(cfg_short, adversary, Scheduler::cmu, r1);
  auto s_long = simulate(cfg_long, adversary, Scheduler::cmu, r2);
  for (std::size_t k = 0; k < s_short.t.size(); ++k) {
    CHECK(s_long.w_hat_tot[k] == s_short.w_hat_tot[k]);
    CHECK(s_long.j_tot[k] == s_short.j_tot[k]);
  }
}

TEST_CASE("cmu scheduler drains the highest h*mu type first") {
  // Two types, mu = (2, 2), h = (0.5, 1): type 2 has priority. Type 1 brings
  // unit jobs, type 2 short ones; 1.25 units of work arrive per epoch against
  // 1 unit of service, so the backlog builds in type 1 only.
  auto a = UncertaintyClass::from_points(2.0, {{0.0, 0.25}});
  auto b = UncertaintyClass::from_points(2.0, {{0.0, 0.25}});
  auto cfg = SystemConfig::make(4, {a, b}, {0.5, 1.0}, 2.0, 1);

  std::vector<JobDistribution> laws{JobDistribution::two_point(1.0, 0.0),
                                    JobDistribution::two_point(0.25, 0.0)};
  auto adversary = AdversaryPolicy::static_laws(laws);
  Rng rng = make_stream(1, 0);
  auto stats = simulate(cfg, adversary, Scheduler::cmu, rng);

  // Non-preemption lets at most two short jobs linger (one admitted at an
  // interval boundary plus a fresh arrival); type 1 grows without bound.
  const double root_n = 2.0;
  for (std::size_t k = 1; k < stats.t.size(); ++k) {
    CHECK(stats.w_hat[1][k] <= 2.0 * 0.25 / root_n + 1e-12);
    CHECK(stats.q_hat[1][k] <= 2.0 / root_n + 1e-12);
  }
  CHECK(stats.q_hat[0].back() > stats.q_hat[1].back());
  CHECK(high_priority_workload(stats) <= 2.0 * 0.25 / root_n + 1e-12);
}

TEST_CASE("simulate rejects invalid adversaries") {
  auto cfg = one_type(10, 5.0);
  Rng rng = make_stream(1, 0);

  auto outside = AdversaryPolicy::static_points({{9.0, 9.0}});
  CHECK_THROWS_AS(simulate(cfg, outside, Scheduler::cmu, rng),
                  std::invalid_argument);

  auto wrong_count = AdversaryPolicy::static_points({{0.0, 0.5}, {0.0, 0.5}});
  CHECK_THROWS_AS(simulate(cfg, wrong_count, Scheduler::cmu, rng),
                  std::invalid_argument);

  auto bad_weights = AdversaryPolicy::iid_random({{0.0}});
  CHECK_THROWS_AS(simulate(cfg, bad_weights, Scheduler::cmu, rng),
                  std::invalid_argument);
}

TEST_CASE("iid-random adversary runs") {
  auto cls = UncertaintyClass::from_points(1.0, {{1.0, 0.25}, {0.0, 0.5}});
  auto cfg = SystemConfig::make(25, {cls}, {1.0}, 4.0, 13);
  auto adversary = AdversaryPolicy::iid_random({{0.5, 0.5}});
  Rng rng = make_stream(13, 0);
  auto stats = simulate(cfg, adversary, Scheduler::cmu, rng);
  CHECK(stats.t.size() == 101);
  CHECK(stats.discounted_cost > 0.0);
}

TEST_CASE("estimate_cost: zero-size jobs give (0, 0)") {
  auto cfg = one_type(20, 5.0, 2);
  auto est = estimate_cost(cfg, constant_jobs(0.0), Scheduler::cmu, 8);
  CHECK(est.mean == 0.0);
  CHECK(est.ci95 == 0.0);
}

TEST_CASE("doubling replications shrinks the confidence interval by ~sqrt(2)") {
  auto cfg = one_type(50, 10.0, 17);
  auto adversary = AdversaryPolicy::static_points({{0.0, 0.5}});
  auto small = estimate_cost(cfg, adversary, Scheduler::cmu, 400);
  auto big = estimate_cost(cfg, adversary, Scheduler::cmu, 800);
  const double ratio = small.ci95 / big.ci95;
  CHECK(ratio > 1.15);
  CHECK(ratio < 1.75);
}

TEST_CASE("summary mode matches full mode") {
  auto cfg = one_type(30, 6.0, 23);
  auto adversary = AdversaryPolicy::static_points({{0.0, 0.5}});
  Rng r1 = make_stream(23, 0);
  Rng r2 = make_stream(23, 0);
  auto full = simulate(cfg, adversary, Scheduler::cmu, r1, RecordMode::full);
  auto summary = simulate(cfg, adversary, Scheduler::cmu, r2, RecordMode::summary);
  CHECK(summary.discounted_cost == full.discounted_cost);
  CHECK(summary.rsp_gap == full.rsp_gap);
  CHECK(summary.high_priority_sup == full.high_priority_sup);
  CHECK(summary.t.empty());

  // the recorded running sup agrees with a recomputation from the paths
  double recomputed = 0.0;
  for (std::size_t k = 0; k < full.t.size(); ++k)
    recomputed = std::max(
        recomputed,
        std::abs(full.q_hat[0][k] - cfg.classes[0].mu() * full.w_hat[0][k]));
  CHECK(recomputed == full.rsp_gap[0]);
}
