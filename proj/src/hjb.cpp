#include "htg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "htg/errors.hpp"
#include "htg/format.hpp"

namespace htg {

std::size_t HJBSolution::nearest_node(double w) const {
  if (w < 0.0) throw std::invalid_argument("HJBSolution: w must be >= 0");
  if (w >= x_max()) return grid.size() - 1;
  return static_cast<std::size_t>(std::llround(w / step));
}

namespace {

// Tridiagonal solve (Thomas), overwrites rhs with the solution.
void solve_tridiagonal(std::vector<double>& lo, std::vector<double>& di,
                       std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t m = di.size();
  for (std::size_t i = 1; i < m; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[m - 1] /= di[m - 1];
  for (std::size_t i = m - 1; i-- > 0;)
    rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

void derivatives_on_grid(const std::vector<double>& u, double h,
                         std::vector<double>& du, std::vector<double>& ddu) {
  const std::size_t M = u.size() - 1;
  du.resize(M + 1);
  ddu.resize(M + 1);
  for (std::size_t i = 1; i < M; ++i) {
    du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    ddu[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
  }
  du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  du[M] = (3.0 * u[M] - 4.0 * u[M - 1] + u[M - 2]) / (2.0 * h);
  ddu[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
  ddu[M] = (2.0 * u[M] - 5.0 * u[M - 1] + 4.0 * u[M - 2] - u[M - 3]) / (h * h);
}

}  // namespace

HJBSolution solve_hjb(const std::vector<UncertaintyClass>& classes,
                      const SolverOptions& opts) {
  if (classes.empty()) throw std::invalid_argument("solve_hjb: no classes");
  if (!(opts.step > 0.0) || !(opts.x_max > 0.0) || !(opts.tol > 0.0))
    throw std::invalid_argument("solve_hjb: step, x_max, tol must be > 0");
  if (opts.step > opts.x_max / 100.0)
    throw std::invalid_argument("solve_hjb: step must be <= x_max/100");
  for (const auto& cls : classes)
    for (const auto& p : cls.points())
      if (!(p.q > 0.0)) throw std::invalid_argument("solve_hjb: q <= 0 breaks ellipticity");

  const double h = opts.step;
  const std::size_t M = static_cast<std::size_t>(std::llround(opts.x_max / h));
  const std::size_t L = classes.size();

  HJBSolution sol;
  sol.step = h;
  sol.grid.resize(M + 1);
  for (std::size_t i = 0; i <= M; ++i) sol.grid[i] = static_cast<double>(i) * h;
  sol.u.assign(M + 1, 0.0);
  // Far-field initial guess: u' = 1, u'' = 0.
  sol.du.assign(M + 1, 1.0);
  sol.ddu.assign(M + 1, 0.0);
  sol.policy.assign(L, std::vector<DriftVarPoint>(M + 1));

  auto refresh_policy = [&](std::vector<std::vector<DriftVarPoint>>& pol) {
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t i = 0; i <= M; ++i) {
        // u', u'' >= 0 for the true solution; clamping discretization noise
        // keeps the argmax inside the extreme-dominating set.
        const double v1 = std::max(sol.du[i], 0.0);
        const double v2 = std::max(sol.ddu[i], 0.0);
        pol[l][i] = hamiltonian(v1, v2, classes[l], /*reduced=*/true).argmax;
      }
  };
  refresh_policy(sol.policy);

  std::vector<double> lo(M + 1), di(M + 1), up(M + 1), rhs(M + 1), u_prev;
  auto fresh = sol.policy;

  for (int it = 1; it <= opts.max_policy_iterations; ++it) {
    // Assemble with the frozen per-node coefficients.
    for (std::size_t i = 1; i < M; ++i) {
      double B = 0.0, Q = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        B += sol.policy[l][i].b;
        Q += sol.policy[l][i].q;
      }
      lo[i] = Q / (h * h) - B / (2.0 * h);
      di[i] = -2.0 * Q / (h * h) - 1.0;
      up[i] = Q / (h * h) + B / (2.0 * h);
      rhs[i] = -sol.grid[i];
    }
    // u'(0) = 0: -3u0 + 4u1 - u2 = 0, with u2 eliminated through row 1.
    di[0] = -3.0 + lo[1] / up[1];
    up[0] = 4.0 + di[1] / up[1];
    rhs[0] = rhs[1] / up[1];
    lo[0] = 0.0;
    // u'(x_max) = 1: u_{M-2} - 4u_{M-1} + 3u_M = 2h, u_{M-2} eliminated.
    lo[M] = -4.0 - di[M - 1] / lo[M - 1];
    di[M] = 3.0 - up[M - 1] / lo[M - 1];
    rhs[M] = 2.0 * h - rhs[M - 1] / lo[M - 1];
    up[M] = 0.0;

    u_prev = sol.u;
    sol.u = rhs;
    {
      auto lo2 = lo, di2 = di, up2 = up;
      solve_tridiagonal(lo2, di2, up2, sol.u);
    }
    derivatives_on_grid(sol.u, h, sol.du, sol.ddu);
    refresh_policy(fresh);

    double residual = 0.0;
    for (std::size_t i = 1; i < M; ++i) {
      double hsum = 0.0;
      for (std::size_t l = 0; l < L; ++l)
        hsum += fresh[l][i].b * sol.du[i] + fresh[l][i].q * sol.ddu[i];
      residual = std::max(residual, std::abs(hsum - sol.u[i] + sol.grid[i]));
    }
    sol.residual = residual;
    sol.iterations = it;

    const bool stable = fresh == sol.policy;
    double du_max = 0.0, u_scale = 1.0;
    for (std::size_t i = 0; i <= M; ++i) {
      du_max = std::max(du_max, std::abs(sol.u[i] - u_prev[i]));
      u_scale = std::max(u_scale, std::abs(sol.u[i]));
    }
    const bool value_frozen = it > 1 && du_max <= 1e-13 * u_scale;

    sol.policy = fresh;
    if ((stable || value_frozen) && residual <= opts.tol) return sol;
  }
  throw SolverError("solve_hjb: policy iteration did not converge", sol.residual);
}

AnalyticSolution analytic_singleton(double b, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("analytic_singleton: q must be > 0");
  return {b, q, (-b - std::sqrt(b * b + 4.0 * q)) / (2.0 * q)};
}

double AnalyticSolution::u(double w) const {
  return w + b - std::exp(lambda * w) / lambda;
}
double AnalyticSolution::du(double w) const { return 1.0 - std::exp(lambda * w); }
double AnalyticSolution::ddu(double w) const { return -lambda * std::exp(lambda * w); }

FeedbackPolicy::FeedbackPolicy(std::shared_ptr<const HJBSolution> sol,
                               std::vector<UncertaintyClass> classes)
    : sol_(std::move(sol)), classes_(std::move(classes)) {
  if (!sol_ || sol_->policy.size() != classes_.size())
    throw std::invalid_argument("FeedbackPolicy: solution/classes mismatch");
}

DriftVarPoint FeedbackPolicy::point(std::size_t ell, double w) const {
  return sol_->policy[ell][sol_->nearest_node(w)];
}

JobDistribution FeedbackPolicy::member(std::size_t ell, double w, long n) const {
  return classes_[ell].member(point(ell, w), n);
}

FeedbackPolicy extract_policy(HJBSolution sol, std::vector<UncertaintyClass> classes) {
  return FeedbackPolicy(std::make_shared<HJBSolution>(std::move(sol)),
                        std::move(classes));
}

std::optional<double> two_mode_threshold(const HJBSolution& sol,
                                         const UncertaintyClass& cls,
                                         std::size_t class_index) {
  if (cls.points().size() < 2)
    throw std::invalid_argument("two_mode_threshold: class has a single point");
  const auto& reduced = cls.extreme_dominating();
  if (reduced.size() == 1) return std::nullopt;  // one mode is selected everywhere
  if (reduced.size() != 2)
    throw std::invalid_argument("two_mode_threshold: reduced set is not two-mode");
  // reduced is sorted by b ascending: mode 2 = low drift / high variance.
  const DriftVarPoint low_drift = reduced[0], high_drift = reduced[1];
  if (!(high_drift.b > low_drift.b && high_drift.q < low_drift.q))
    throw std::invalid_argument("two_mode_threshold: modes are not drift/variance ordered");

  const auto& pol = sol.policy.at(class_index);
  std::optional<double> w_star;
  int switches = 0;
  for (std::size_t i = 1; i < pol.size(); ++i) {
    if (pol[i] == pol[i - 1]) continue;
    ++switches;
    if (switches > 1 || !(pol[i - 1] == low_drift && pol[i] == high_drift))
      throw std::runtime_error(
          "two_mode_threshold: policy is not a single low-to-high-drift switch");
    w_star = sol.grid[i];
  }
  return w_star;
}

void write_solution_csv(const HJBSolution& sol, std::ostream& os) {
  os << "w,u,du,ddu";
  for (std::size_t l = 0; l < sol.policy.size(); ++l)
    os << ",argmax_b_" << (l + 1) << ",argmax_q_" << (l + 1);
  os << "\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    os << fmt_full(sol.grid[i]) << ',' << fmt_full(sol.u[i]) << ','
       << fmt_full(sol.du[i]) << ',' << fmt_full(sol.ddu[i]);
    for (std::size_t l = 0; l < sol.policy.size(); ++l)
      os << ',' << fmt_full(sol.policy[l][i].b) << ',' << fmt_full(sol.policy[l][i].q);
    os << "\n";
  }
}

}  // namespace htg
