#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "htg/errors.hpp"
#include "htg/hjb.hpp"

using namespace htg;

namespace {

UncertaintyClass singleton(double b, double q, double mu = 1.0) {
  return UncertaintyClass::from_points(mu, {{b, q}});
}

double sup_error_vs_analytic(const HJBSolution& sol, const AnalyticSolution& ref,
                             double w_hi) {
  double sup = 0.0;
  for (std::size_t i = 0; i < sol.grid.size() && sol.grid[i] <= w_hi; ++i)
    sup = std::max(sup, std::abs(sol.u[i] - ref.u(sol.grid[i])));
  return sup;
}

}  // namespace

TEST_CASE("analytic singleton solution") {
  auto ref = analytic_singleton(0.0, 0.5);
  CHECK(ref.u(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(analytic_singleton(1.0, 1.0).u(0.0) ==
        doctest::Approx(1.0 + 2.0 / (1.0 + std::sqrt(5.0))).epsilon(1e-12));

  // substituting back into the equation: residual at machine scale on [0, 20]
  for (auto [b, q] : {std::pair{0.0, 0.5}, {1.0, 1.0}, {-0.5, 0.25}, {2.0, 0.1}}) {
    auto a = analytic_singleton(b, q);
    CHECK(a.du(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    for (double w = 0.0; w <= 20.0; w += 0.37) {
      const double res = q * a.ddu(w) + b * a.du(w) - a.u(w) + w;
      CHECK(std::abs(res) < 1e-12);
    }
  }
}

TEST_CASE("solver matches the closed form on singleton classes") {
  for (auto [b, q] : {std::pair{0.0, 0.5}, {1.0, 1.0}}) {
    auto sol = solve_hjb({singleton(b, q)});
    auto ref = analytic_singleton(b, q);
    CHECK(sup_error_vs_analytic(sol, ref, 10.0) < 1e-3);
    CHECK(sol.u[0] == doctest::Approx(ref.u(0.0)).epsilon(1e-4));
    CHECK(sol.residual <= 1e-6);
  }
}

TEST_CASE("singleton Hamiltonians add across classes") {
  auto two = solve_hjb({singleton(0.0, 0.25, 2.0), singleton(0.0, 0.25, 2.0)});
  auto one = solve_hjb({singleton(0.0, 0.5)});
  double sup = 0.0;
  for (std::size_t i = 0; i < one.u.size(); ++i)
    sup = std::max(sup, std::abs(two.u[i] - one.u[i]));
  CHECK(sup < 1e-6);
}

TEST_CASE("solution shape invariants") {
  auto cls = UncertaintyClass::from_points(1.0, {{1.0, 0.25}, {0.0, 0.5}});
  auto sol = solve_hjb({cls});
  const std::size_t M = sol.grid.size() - 1;
  CHECK(std::abs(sol.du[0]) <= 1e-9);
  for (std::size_t i = 0; i <= M; ++i) {
    CHECK(sol.u[i] >= -1e-9);
    CHECK(sol.du[i] >= -1e-9);
    CHECK(sol.du[i] <= 1.0 + 1e-6);
    CHECK(sol.ddu[i] >= -1e-6);
  }
  CHECK(sol.du[M] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.u[M] - sol.u[M - 1] <= (1.0 + 1e-6) * sol.step);

  // at the fixed point the frozen argmax attains the fresh full-scan maximum
  for (std::size_t i = 1; i < M; i += 997) {
    const double v1 = std::max(sol.du[i], 0.0), v2 = std::max(sol.ddu[i], 0.0);
    const double frozen = sol.policy[0][i].b * v1 + sol.policy[0][i].q * v2;
    CHECK(frozen == hamiltonian(v1, v2, cls, false).value);
  }
}

TEST_CASE("grid refinement converges at first order or better") {
  auto cls = UncertaintyClass::from_points(1.0, {{1.0, 0.25}, {0.0, 0.5}});
  SolverOptions coarse, mid, fine;
  coarse.step = 8e-3;
  mid.step = 4e-3;
  fine.step = 2e-3;
  auto s0 = solve_hjb({cls}, coarse);
  auto s1 = solve_hjb({cls}, mid);
  auto s2 = solve_hjb({cls}, fine);
  // compare on the coarse grid (every 2nd node of the finer one)
  auto dist = [](const HJBSolution& c, const HJBSolution& f) {
    double sup = 0.0;
    for (std::size_t i = 0; i < c.u.size(); ++i)
      sup = std::max(sup, std::abs(c.u[i] - f.u[2 * i]));
    return sup;
  };
  const double d01 = dist(s0, s1);
  const double d12 = dist(s1, s2);
  CHECK(d12 <= d01 / 2.0 + 1e-12);
}

TEST_CASE("restricting classes to their reduced sets leaves u unchanged") {
  std::vector<DriftVarPoint> cloud{{1.0, 0.25}, {0.0, 0.5}, {-0.5, 0.1},
                                   {0.2, 0.2},  {0.5, 0.3}, {-1.0, 0.4}};
  auto full = UncertaintyClass::from_points(1.0, cloud);
  auto reduced = UncertaintyClass::from_points(1.0, full.extreme_dominating());
  auto s_full = solve_hjb({full});
  auto s_reduced = solve_hjb({reduced});
  double sup = 0.0;
  for (std::size_t i = 0; i < s_full.u.size(); ++i)
    sup = std::max(sup, std::abs(s_full.u[i] - s_reduced.u[i]));
  CHECK(sup < 1e-6);
}

TEST_CASE("extract_policy") {
  auto cls = UncertaintyClass::from_points(1.0, {{1.0, 0.25}, {0.0, 0.5}});
  auto sol = solve_hjb({cls});
  auto policy = extract_policy(sol, {cls});

  // at w = 0 the high-variance mode wins (u'(0) = 0, u''(0) > 0)
  CHECK(policy.point(0, 0.0) == DriftVarPoint{0.0, 0.5});
  // far out the high-drift mode wins
  CHECK(policy.point(0, 15.0) == DriftVarPoint{1.0, 0.25});
  // beyond x_max clamps to the last node
  CHECK(policy.point(0, 1e9) == policy.point(0, policy.x_max()));
  CHECK_THROWS_AS(policy.point(0, -0.1), std::invalid_argument);

  // policy values stay inside the reduced set
  const auto& reduced = cls.extreme_dominating();
  for (double w = 0.0; w <= 20.0; w += 0.83) {
    const auto p = policy.point(0, w);
    CHECK(std::find(reduced.begin(), reduced.end(), p) != reduced.end());
  }

  // singleton class: constant policy
  auto single = singleton(0.3, 0.4);
  auto ssol = solve_hjb({single});
  auto spolicy = extract_policy(ssol, {single});
  for (double w = 0.0; w <= 20.0; w += 1.7)
    CHECK(spolicy.point(0, w) == DriftVarPoint{0.3, 0.4});
}

TEST_CASE("two-mode threshold") {
  auto cls = UncertaintyClass::from_points(1.0, {{1.0, 0.25}, {0.0, 0.5}});
  auto sol = solve_hjb({cls});
  auto w_star = two_mode_threshold(sol, cls);
  REQUIRE(w_star.has_value());
  CHECK(*w_star > 0.0);
  // regression baseline recorded from the first verified run
  CHECK(*w_star == doctest::Approx(0.235).epsilon(0.02));
  CHECK(sol.u[0] == doctest::Approx(1.2624724).epsilon(1e-5));

  // mode-2 region is [0, w*): policy below the switch is the high-variance point
  const std::size_t k = sol.nearest_node(*w_star);
  CHECK(sol.policy[0][k - 1] == DriftVarPoint{0.0, 0.5});
  CHECK(sol.policy[0][k] == DriftVarPoint{1.0, 0.25});

  // equal variances: the high-drift mode dominates, no switch
  auto equal_q = UncertaintyClass::from_points(1.0, {{1.0, 0.5}, {0.0, 0.5}});
  auto sol_eq = solve_hjb({equal_q});
  CHECK_FALSE(two_mode_threshold(sol_eq, equal_q).has_value());

  // one-point class violates the precondition
  auto single = singleton(0.0, 0.5);
  auto ssol = solve_hjb({single});
  CHECK_THROWS_AS(two_mode_threshold(ssol, single), std::invalid_argument);
}

TEST_CASE("solver rejects bad inputs") {
  auto cls = singleton(0.0, 0.5);
  SolverOptions bad;
  bad.step = 1.0;  // step > x_max/100
  CHECK_THROWS_AS(solve_hjb({cls}, bad), std::invalid_argument);
  const std::vector<UncertaintyClass> none;
  CHECK_THROWS_AS(solve_hjb(none), std::invalid_argument);
}
