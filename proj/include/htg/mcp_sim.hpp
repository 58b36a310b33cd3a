// Euler simulation of the limiting controlled reflected diffusion, with
// coefficients read off the solved feedback policy (possibly discontinuous
// in w), and Monte Carlo estimation of the limit value for cross-validation
// against the solved u.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "htg/hjb.hpp"
#include "htg/replication.hpp"
#include "htg/rng.hpp"

namespace htg {

struct DiffusionSpec {
  std::function<double(double)> drift;  // b(w) = sum_l b_l(w)
  std::function<double(double)> vol;    // sigma(w) = (sum_l 2 q_l(w))^{1/2}
  double w0 = 0.0;
  double step = 1e-3;
  double horizon = 25.0;
};

struct EulerPath {
  std::vector<double> t;
  std::vector<double> w;
  double discounted_integral = 0.0;  // int_0^T e^-t W_t dt, trapezoid rule
};

// Projection scheme: W_{t+h} = max(W_t + b(W_t) h + sigma(W_t) sqrt(h) xi, 0),
// coefficients evaluated at the left endpoint of each step.
EulerPath euler_reflected(const DiffusionSpec& spec, Rng& rng);

struct McpOptions {
  double step = 1e-3;
  double horizon = 25.0;
  int jobs = 0;
};

// Drift/vol of the solved optimal diffusion at w.
DiffusionSpec optimal_diffusion(const FeedbackPolicy& policy, double w0,
                                const McpOptions& opts = {});

// Monte Carlo mean of the discounted workload integral under the optimal
// coefficients; converges to u(w0). Streams derive from (seed, rep).
EstimateSummary estimate_mcp_value(const HJBSolution& sol,
                                   const std::vector<UncertaintyClass>& classes,
                                   double w0, std::size_t replications,
                                   std::uint64_t seed, const McpOptions& opts = {});

}  // namespace htg
