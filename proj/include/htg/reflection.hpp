// One-dimensional reflection (Skorohod) map on the half line, for
// right-continuous piecewise-constant paths, plus its one-step form.
#pragma once

#include <vector>

namespace htg {

// Piecewise-constant path sampled at its jump times. Between samples the
// path holds the previous value.
struct SampledPath {
  std::vector<double> times;   // strictly increasing, times[0] == 0
  std::vector<double> values;  // same length as times
};

// Decomposition phi = psi + eta with phi >= 0, eta nondecreasing, and eta
// increasing only where phi = 0.
struct ReflectedPair {
  SampledPath phi;  // reflected path
  SampledPath eta;  // regulator
};

// Evaluates (Gamma_1 psi, Gamma_2 psi) at the sample times of psi via the
// running supremum of psi^-. Throws std::invalid_argument on an empty path,
// times not starting at 0, non-increasing times, or non-finite values.
ReflectedPair skorohod_map(const SampledPath& psi);

struct LindleyStep {
  double w_next;   // max(w + increment, 0)
  double delta_r;  // regulator push, > 0 only when w_next == 0
};

// One reflected step from w >= 0. Total on valid inputs.
LindleyStep lindley_step(double w, double increment);

}  // namespace htg
