#include "htg/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace htg {

JobDistribution JobDistribution::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("JobDistribution::gamma: shape and rate must be > 0");
  JobDistribution d;
  d.kind_ = Kind::gamma;
  d.shape_ = shape;
  d.rate_ = rate;
  d.mean_ = shape / rate;
  d.variance_ = shape / (rate * rate);
  return d;
}

JobDistribution JobDistribution::two_point(double xi, double v) {
  if (!(xi >= 0.0) || !(v >= 0.0))
    throw std::invalid_argument("JobDistribution::two_point: xi and v must be >= 0");
  if (xi == 0.0 && v != 0.0)
    throw std::invalid_argument("JobDistribution::two_point: zero mean requires zero variance");
  JobDistribution d;
  d.kind_ = Kind::two_point;
  d.mean_ = xi;
  d.variance_ = v;
  if (xi == 0.0) {
    d.atom_ = 0.0;
    d.atom_prob_ = 0.0;
  } else {
    d.atom_ = (v + xi * xi) / xi;
    d.atom_prob_ = xi / d.atom_;
  }
  return d;
}

double JobDistribution::fourth_moment() const {
  if (kind_ == Kind::gamma) {
    // E[X^4] = shape (shape+1) (shape+2) (shape+3) / rate^4
    const double a = shape_, r = rate_;
    return a * (a + 1.0) * (a + 2.0) * (a + 3.0) / (r * r * r * r);
  }
  return atom_prob_ * atom_ * atom_ * atom_ * atom_;
}

double JobDistribution::sample(Rng& rng) const {
  if (kind_ == Kind::gamma) {
    std::gamma_distribution<double> dist(shape_, 1.0 / rate_);
    return dist(rng);
  }
  if (atom_prob_ >= 1.0) return atom_;
  if (atom_prob_ <= 0.0) return 0.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < atom_prob_ ? atom_ : 0.0;
}

DriftVarPoint prelimit_coeffs(const JobDistribution& pi, double mu, long n) {
  if (!(mu > 0.0)) throw std::invalid_argument("prelimit_coeffs: mu must be > 0");
  if (n < 1) throw std::invalid_argument("prelimit_coeffs: n must be >= 1");
  const double root_n = std::sqrt(static_cast<double>(n));
  return {root_n * (pi.mean() - 1.0 / mu), pi.half_variance()};
}

namespace {
double required_mean(double b, double mu, long n) {
  if (!(mu > 0.0)) throw std::invalid_argument("make member: mu must be > 0");
  if (n < 1) throw std::invalid_argument("make member: n must be >= 1");
  return 1.0 / mu + b / std::sqrt(static_cast<double>(n));
}
}  // namespace

JobDistribution make_two_point(double b, double q, double mu, long n) {
  if (!(q > 0.0)) throw std::invalid_argument("make_two_point: q must be > 0");
  const double xi = required_mean(b, mu, n);
  if (!(xi > 0.0))
    throw std::invalid_argument("make_two_point: mean 1/mu + b/sqrt(n) <= 0 at this n");
  return JobDistribution::two_point(xi, 2.0 * q);
}

JobDistribution make_gamma_member(double b, double q, double mu, long n) {
  if (!(q > 0.0)) throw std::invalid_argument("make_gamma_member: q must be > 0");
  const double m = required_mean(b, mu, n);
  if (!(m > 0.0))
    throw std::invalid_argument("make_gamma_member: mean 1/mu + b/sqrt(n) <= 0 at this n");
  const double v = 2.0 * q;
  return JobDistribution::gamma(m * m / v, m / v);
}

}  // namespace htg
