// Sampleable job-size laws with exact first and second moments, and the
// translation between a law and its prelimit drift / half-variance pair.
#pragma once

#include <cstdint>

#include "htg/rng.hpp"

namespace htg {

// Prelimit drift b and half-variance q of a job-size law.
struct DriftVarPoint {
  double b = 0.0;
  double q = 0.0;

  friend bool operator==(const DriftVarPoint&, const DriftVarPoint&) = default;
};

// Lexicographic (b, q) order, used for deterministic argmax tie-breaks.
inline bool lex_less(const DriftVarPoint& a, const DriftVarPoint& c) {
  return a.b < c.b || (a.b == c.b && a.q < c.q);
}

// Nonnegative law, either Gamma(shape, rate) or the two-point law taking
// value a = (v + xi^2)/xi with probability xi/a and 0 otherwise, which has
// mean xi and variance v exactly. Both kinds have finite fourth moment.
class JobDistribution {
 public:
  enum class Kind { gamma, two_point };

  static JobDistribution gamma(double shape, double rate);
  // xi >= 0, v >= 0; xi == 0 requires v == 0 (the constant-zero law).
  static JobDistribution two_point(double xi, double v);

  Kind kind() const { return kind_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double half_variance() const { return 0.5 * variance_; }
  double fourth_moment() const;  // E[X^4], closed form for both kinds

  // Gamma parameters (valid only for Kind::gamma).
  double shape() const { return shape_; }
  double rate() const { return rate_; }
  // Two-point support (valid only for Kind::two_point).
  double atom() const { return atom_; }
  double atom_prob() const { return atom_prob_; }

  double sample(Rng& rng) const;

 private:
  JobDistribution() = default;
  Kind kind_ = Kind::two_point;
  double mean_ = 0.0, variance_ = 0.0;
  double shape_ = 0.0, rate_ = 0.0;      // gamma
  double atom_ = 0.0, atom_prob_ = 0.0;  // two-point
};

// (b, q) of `pi` in the n-th system with first-order rate mu:
// b = sqrt(n) (mean(pi) - 1/mu), q = variance(pi)/2.
DriftVarPoint prelimit_coeffs(const JobDistribution& pi, double mu, long n);

// Two-point law realizing (b, q) exactly at level n: mean 1/mu + b/sqrt(n),
// variance 2q. Throws std::invalid_argument when the required mean is <= 0
// (b too negative for this n).
JobDistribution make_two_point(double b, double q, double mu, long n);

// Gamma law with the same mean and variance; used where a continuous member
// realizing (b, q) is wanted.
JobDistribution make_gamma_member(double b, double q, double mu, long n);

}  // namespace htg
