#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "htg/distributions.hpp"

using namespace htg;

namespace {

// Empirical mean over `draws` samples must sit within 4 standard errors.
void check_moments(const JobDistribution& d, std::size_t draws, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double x = d.sample(rng);
    REQUIRE(x >= 0.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / draws;
  const double var = sumsq / draws - mean * mean;
  const double se_mean = std::sqrt(d.variance() / draws);
  CHECK(std::abs(mean - d.mean()) <= 4.0 * se_mean + 1e-12);
  // Variance of the sample variance ~ (m4 - var^2)/draws.
  const double se_var =
      std::sqrt(std::max(d.fourth_moment() - d.variance() * d.variance(), 0.0) /
                static_cast<double>(draws));
  CHECK(std::abs(var - d.variance()) <= 4.0 * se_var + 1e-9);
}

}  // namespace

TEST_CASE("two-point law has exact moments") {
  auto d = JobDistribution::two_point(1.05, 1.0);
  CHECK(d.mean() == 1.05);
  CHECK(d.variance() == 1.0);
  CHECK(d.atom() == doctest::Approx(2.002380952380952).epsilon(1e-15));
  CHECK(d.atom_prob() == doctest::Approx(0.524375743162901).epsilon(1e-12));

  CHECK_THROWS_AS(JobDistribution::two_point(0.0, 1.0), std::invalid_argument);
  CHECK(JobDistribution::two_point(0.0, 0.0).mean() == 0.0);
}

TEST_CASE("gamma law moments") {
  auto d = JobDistribution::gamma(2.0, 2.0);
  CHECK(d.mean() == doctest::Approx(1.0));
  CHECK(d.variance() == doctest::Approx(0.5));
  CHECK(d.half_variance() == doctest::Approx(0.25));
  // E[X^4] = a(a+1)(a+2)(a+3)/r^4 = 2*3*4*5/16
  CHECK(d.fourth_moment() == doctest::Approx(7.5));
}

TEST_CASE("prelimit coefficients") {
  // Gamma(2,2) with mu = 1: mean 1 => b = 0 for every n, q = 0.25.
  auto g = JobDistribution::gamma(2.0, 2.0);
  for (long n : {1L, 100L, 10000L}) {
    auto p = prelimit_coeffs(g, 1.0, n);
    CHECK(p.b == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.q == doctest::Approx(0.25));
  }
}

TEST_CASE("make_two_point round-trips (b, q) exactly") {
  auto d = make_two_point(0.5, 0.5, 1.0, 100);
  CHECK(d.mean() == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(d.variance() == 1.0);
  auto p = prelimit_coeffs(d, 1.0, 100);
  CHECK(std::abs(p.b - 0.5) <= 1e-12);
  CHECK(p.q == 0.5);  // half-variance is stored, not recomputed

  // zero drift keeps the mean at 1/mu for every n
  for (long n : {1L, 7L, 400L})
    CHECK(make_two_point(0.0, 0.3, 2.0, n).mean() == 0.5);

  // infeasible drift for small n
  CHECK_THROWS_AS(make_two_point(-10.0, 0.5, 1.0, 4), std::invalid_argument);
}

TEST_CASE("make_gamma_member matches the target moments") {
  auto d = make_gamma_member(0.5, 0.5, 1.0, 100);
  CHECK(d.mean() == doctest::Approx(1.05).epsilon(1e-14));
  CHECK(d.variance() == doctest::Approx(1.0).epsilon(1e-14));
  auto p = prelimit_coeffs(d, 1.0, 100);
  CHECK(p.b == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.q == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("sampling: degenerate two-point is constant") {
  auto d = JobDistribution::two_point(1.0, 0.0);
  Rng rng = make_stream(1, 0);
  for (int i = 0; i < 100; ++i) CHECK(d.sample(rng) == 1.0);
}

TEST_CASE("sampling: moment tests at 1e6 draws") {
  check_moments(JobDistribution::two_point(1.05, 1.0), 1000000, 11);
  check_moments(JobDistribution::gamma(2.0, 2.0), 1000000, 12);
}
