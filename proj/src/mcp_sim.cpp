#include "htg/mcp_sim.hpp"

#include <cmath>
#include <stdexcept>

namespace htg {

namespace {

// One replication without storing the path; `disc` holds e^{-t_k} on the
// step grid so replications share the exponentials.
template <class Drift, class Vol>
double euler_discounted(const Drift& drift, const Vol& vol, double w0, double h,
                        const std::vector<double>& disc, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double root_h = std::sqrt(h);
  double w = w0;
  double acc = 0.5 * disc[0] * w;  // trapezoid end weights are 1/2
  const std::size_t steps = disc.size() - 1;
  for (std::size_t k = 0; k < steps; ++k) {
    const double next = w + drift(w) * h + vol(w) * root_h * normal(rng);
    w = next > 0.0 ? next : 0.0;
    acc += (k + 1 == steps ? 0.5 : 1.0) * disc[k + 1] * w;
  }
  return acc * h;
}

std::vector<double> discount_grid(double h, double horizon) {
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / h));
  if (steps == 0) throw std::invalid_argument("euler: horizon shorter than one step");
  std::vector<double> disc(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k)
    disc[k] = std::exp(-static_cast<double>(k) * h);
  return disc;
}

}  // namespace

EulerPath euler_reflected(const DiffusionSpec& spec, Rng& rng) {
  if (!(spec.step > 0.0) || !(spec.horizon > 0.0))
    throw std::invalid_argument("euler_reflected: step and horizon must be > 0");
  if (!(spec.w0 >= 0.0))
    throw std::invalid_argument("euler_reflected: w0 must be >= 0");

  const double h = spec.step;
  const auto disc = discount_grid(h, spec.horizon);
  const std::size_t steps = disc.size() - 1;

  EulerPath path;
  path.t.resize(steps + 1);
  path.w.resize(steps + 1);
  path.w[0] = spec.w0;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double root_h = std::sqrt(h);
  for (std::size_t k = 0; k < steps; ++k) {
    path.t[k] = static_cast<double>(k) * h;
    const double w = path.w[k];
    const double next = w + spec.drift(w) * h + spec.vol(w) * root_h * normal(rng);
    path.w[k + 1] = next > 0.0 ? next : 0.0;
  }
  path.t[steps] = static_cast<double>(steps) * h;

  double acc = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double weight = (k == 0 || k == steps) ? 0.5 : 1.0;
    acc += weight * disc[k] * path.w[k];
  }
  path.discounted_integral = acc * h;
  return path;
}

DiffusionSpec optimal_diffusion(const FeedbackPolicy& policy, double w0,
                                const McpOptions& opts) {
  DiffusionSpec spec;
  spec.w0 = w0;
  spec.step = opts.step;
  spec.horizon = opts.horizon;
  spec.drift = [policy](double w) {
    double b = 0.0;
    const double wc = std::min(w, policy.x_max());
    for (std::size_t l = 0; l < policy.num_classes(); ++l)
      b += policy.point(l, wc).b;
    return b;
  };
  spec.vol = [policy](double w) {
    double twice_q = 0.0;
    const double wc = std::min(w, policy.x_max());
    for (std::size_t l = 0; l < policy.num_classes(); ++l)
      twice_q += 2.0 * policy.point(l, wc).q;
    return std::sqrt(twice_q);
  };
  return spec;
}

EstimateSummary estimate_mcp_value(const HJBSolution& sol,
                                   const std::vector<UncertaintyClass>& classes,
                                   double w0, std::size_t replications,
                                   std::uint64_t seed, const McpOptions& opts) {
  if (replications < 2)
    throw std::invalid_argument("estimate_mcp_value: need at least 2 replications");
  if (!(w0 >= 0.0)) throw std::invalid_argument("estimate_mcp_value: w0 must be >= 0");

  FeedbackPolicy policy(std::make_shared<HJBSolution>(sol), classes);
  const auto disc = discount_grid(opts.step, opts.horizon);

  // The per-node coefficients are piecewise constant on the solver grid;
  // flatten them once so the inner loop is array lookups.
  const std::size_t nodes = sol.grid.size();
  std::vector<double> drift_tab(nodes, 0.0), vol_tab(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    double b = 0.0, twice_q = 0.0;
    for (std::size_t l = 0; l < classes.size(); ++l) {
      b += sol.policy[l][i].b;
      twice_q += 2.0 * sol.policy[l][i].q;
    }
    drift_tab[i] = b;
    vol_tab[i] = std::sqrt(twice_q);
  }
  const double grid_step = sol.step;
  const double x_max = sol.x_max();
  auto node_of = [&](double w) {
    const double wc = w >= x_max ? x_max : w;
    return static_cast<std::size_t>(std::llround(wc / grid_step));
  };
  auto drift = [&](double w) { return drift_tab[node_of(w)]; };
  auto vol = [&](double w) { return vol_tab[node_of(w)]; };

  auto values = run_replications(
      replications, seed,
      [&](std::size_t, Rng& rng) {
        return euler_discounted(drift, vol, w0, opts.step, disc, rng);
      },
      opts.jobs);
  return summarize(values);
}

}  // namespace htg
