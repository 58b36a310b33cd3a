// Finite-difference policy-iteration solver for the workload equation
//   sum_l max_{(b,q) in K^l} { b u'(w) + q u''(w) } - u(w) + w = 0,  w >= 0,
// with u'(0) = 0 and linear growth, plus the closed-form singleton oracle
// and the per-class argmax (feedback) policy read off the solved grid.
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "htg/uncertainty.hpp"

namespace htg {

struct SolverOptions {
  double x_max = 20.0;
  double step = 1e-3;
  double tol = 1e-6;
  int max_policy_iterations = 200;
};

struct HJBSolution {
  double step = 0.0;
  std::vector<double> grid;            // 0, step, ..., x_max
  std::vector<double> u, du, ddu;      // value and derivatives on the grid
  // policy[l][i]: argmax point of class l at grid node i
  std::vector<std::vector<DriftVarPoint>> policy;
  double residual = 0.0;  // max |equation| over interior nodes at the fixed point
  int iterations = 0;

  double x_max() const { return grid.back(); }
  std::size_t nearest_node(double w) const;  // w < 0 throws; w > x_max clamps
};

// Howard policy iteration: freeze the per-node argmax, solve the resulting
// linear tridiagonal two-point boundary value problem (u'(0) = 0 and
// u'(x_max) = 1, both second order), repeat until the policy is stable and
// the residual is within tol. Throws SolverError on non-convergence.
HJBSolution solve_hjb(const std::vector<UncertaintyClass>& classes,
                      const SolverOptions& opts = {});

// Unique linear-growth solution of q u'' + b u' - u + w = 0, u'(0) = 0:
// u(w) = w + b - e^{lambda w}/lambda with lambda = (-b - sqrt(b^2+4q))/(2q).
struct AnalyticSolution {
  double b, q, lambda;
  double u(double w) const;
  double du(double w) const;
  double ddu(double w) const;
};
AnalyticSolution analytic_singleton(double b, double q);

// Feedback map w -> per-class argmax point and realizable class member.
class FeedbackPolicy {
 public:
  FeedbackPolicy(std::shared_ptr<const HJBSolution> sol,
                 std::vector<UncertaintyClass> classes);

  std::size_t num_classes() const { return classes_.size(); }
  double x_max() const { return sol_->x_max(); }
  const HJBSolution& solution() const { return *sol_; }
  const std::vector<UncertaintyClass>& classes() const { return classes_; }

  // Nearest-node argmax. w < 0 throws; w > x_max is treated as x_max.
  DriftVarPoint point(std::size_t ell, double w) const;
  JobDistribution member(std::size_t ell, double w, long n) const;

 private:
  std::shared_ptr<const HJBSolution> sol_;
  std::vector<UncertaintyClass> classes_;
};

FeedbackPolicy extract_policy(HJBSolution sol, std::vector<UncertaintyClass> classes);

// For a class whose extreme-dominating set is a two-mode pair
// (b1,q1), (b2,q2) with b1 > b2, q1 < q2: the unique grid node where the
// argmax switches from the high-variance mode to the high-drift mode.
// Returns nullopt when one mode is selected on all of (0, x_max] (including
// classes whose reduced set is a singleton). Throws std::invalid_argument on
// one-point classes or reduced sets larger than two, std::runtime_error if
// the policy switches more than once (solver structure violated).
std::optional<double> two_mode_threshold(const HJBSolution& sol,
                                         const UncertaintyClass& cls,
                                         std::size_t class_index = 0);

// CSV: w,u,du,ddu then argmax_b_l,argmax_q_l per class.
void write_solution_csv(const HJBSolution& sol, std::ostream& os);

}  // namespace htg
