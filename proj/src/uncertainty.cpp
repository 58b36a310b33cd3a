#include "htg/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "htg/errors.hpp"
#include "json.hpp"

namespace htg {

namespace {

std::vector<DriftVarPoint> dedupe_sorted(std::vector<DriftVarPoint> pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double cross(const DriftVarPoint& o, const DriftVarPoint& a, const DriftVarPoint& b) {
  return (a.b - o.b) * (b.q - o.q) - (a.q - o.q) * (b.b - o.b);
}

}  // namespace

std::vector<DriftVarPoint> convex_hull(std::vector<DriftVarPoint> points) {
  if (points.empty()) throw std::invalid_argument("convex_hull: empty input");
  auto pts = dedupe_sorted(std::move(points));
  const std::size_t m = pts.size();
  if (m <= 2) return pts;

  // Monotone chain; popping on cross <= 0 drops collinear interior points.
  std::vector<DriftVarPoint> hull(2 * m);
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {  // lower chain
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower_end = k + 1;
  for (std::size_t i = m - 1; i-- > 0;) {  // upper chain
    while (k >= lower_end && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

std::vector<DriftVarPoint> dominating_set(std::vector<DriftVarPoint> points) {
  if (points.empty()) throw std::invalid_argument("dominating_set: empty input");
  auto pts = dedupe_sorted(std::move(points));
  // Scan from the largest b down; a point survives iff its q exceeds every q
  // seen so far (no point with larger-or-equal b has larger-or-equal q).
  std::vector<DriftVarPoint> kept;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t i = pts.size(); i-- > 0;) {
    if (pts[i].q > best_q) {
      kept.push_back(pts[i]);
      best_q = pts[i].q;
    }
  }
  std::reverse(kept.begin(), kept.end());  // b ascending
  return kept;
}

std::vector<DriftVarPoint> extreme_dominating(const std::vector<DriftVarPoint>& points) {
  const auto hull = convex_hull(points);
  const auto dom = dominating_set(points);
  std::vector<DriftVarPoint> out;
  for (const auto& p : dom)
    if (std::find(hull.begin(), hull.end(), p) != hull.end()) out.push_back(p);
  return out;
}

double hausdorff_distance(std::span<const DriftVarPoint> a,
                          std::span<const DriftVarPoint> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("hausdorff_distance: empty set");
  auto one_sided = [](std::span<const DriftVarPoint> u, std::span<const DriftVarPoint> v) {
    double worst = 0.0;
    for (const auto& x : u) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : v)
        best = std::min(best, std::hypot(x.b - y.b, x.q - y.q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

HamiltonianResult hamiltonian_over(std::span<const DriftVarPoint> points,
                                   double v1, double v2) {
  if (points.empty()) throw std::invalid_argument("hamiltonian_over: empty set");
  HamiltonianResult best{points[0].b * v1 + points[0].q * v2, points[0]};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double val = points[i].b * v1 + points[i].q * v2;
    if (val > best.value || (val == best.value && lex_less(points[i], best.argmax))) {
      best.value = val;
      best.argmax = points[i];
    }
  }
  return best;
}

UncertaintyClass UncertaintyClass::from_points(double mu,
                                               std::vector<DriftVarPoint> points,
                                               MemberKind kind) {
  if (!(mu > 0.0)) throw ConfigError("UncertaintyClass: mu must be > 0");
  if (points.empty()) throw ConfigError("UncertaintyClass: points must be nonempty");
  for (const auto& p : points) {
    if (!std::isfinite(p.b) || !std::isfinite(p.q))
      throw ConfigError("UncertaintyClass: non-finite point");
    if (!(p.q > 0.0)) throw ConfigError("UncertaintyClass: every q must be > 0");
  }
  UncertaintyClass c;
  c.mu_ = mu;
  c.kind_ = kind;
  c.points_ = dedupe_sorted(std::move(points));
  c.hull_ = convex_hull(c.points_);
  c.reduced_ = htg::extreme_dominating(c.points_);
  return c;
}

bool UncertaintyClass::contains(const DriftVarPoint& p, double tol) const {
  for (const auto& x : points_)
    if (std::abs(x.b - p.b) <= tol && std::abs(x.q - p.q) <= tol) return true;
  return false;
}

JobDistribution UncertaintyClass::member(const DriftVarPoint& p, long n) const {
  return kind_ == MemberKind::gamma ? make_gamma_member(p.b, p.q, mu_, n)
                                    : make_two_point(p.b, p.q, mu_, n);
}

HamiltonianResult hamiltonian(double v1, double v2, const UncertaintyClass& cls,
                              bool reduced) {
  if (reduced && v1 >= 0.0 && v2 >= 0.0)
    return hamiltonian_over(cls.extreme_dominating(), v1, v2);
  return hamiltonian_over(cls.points(), v1, v2);
}

std::vector<DecisionRegionSample> decision_regions(
    const UncertaintyClass& cls, std::span<const std::pair<double, double>> v_samples) {
  const auto& reduced = cls.extreme_dominating();
  std::vector<DecisionRegionSample> out;
  out.reserve(v_samples.size());
  for (const auto& [v1, v2] : v_samples) {
    if (v1 < 0.0 || v2 < 0.0)
      throw std::invalid_argument("decision_regions: samples must lie in R+^2");
    const auto h = hamiltonian_over(reduced, v1, v2);
    const auto it = std::find(reduced.begin(), reduced.end(), h.argmax);
    out.push_back({v1, v2, static_cast<std::size_t>(it - reduced.begin()), h.argmax});
  }
  return out;
}

UncertaintyClass gamma_limit_class(double mu, double beta1, double beta2,
                                   double alpha1, double alpha2, int resolution,
                                   GammaRangeForm form) {
  if (!(mu > 0.0)) throw ConfigError("gamma_limit_class: mu must be > 0");
  if (!(beta1 > 0.0) || beta1 > beta2)
    throw ConfigError("gamma_limit_class: need 0 < beta1 <= beta2");
  if (resolution < 2) throw ConfigError("gamma_limit_class: resolution must be >= 2");
  if (-alpha1 > alpha2)
    throw ConfigError("gamma_limit_class: empty drift interval (-alpha1 > alpha2)");

  const double q_lo = mu / (2.0 * beta2);
  const double q_hi = mu / (2.0 * beta1);
  std::vector<DriftVarPoint> pts;
  pts.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int j = 0; j < resolution; ++j) {
    const double q =
        q_lo + (q_hi - q_lo) * static_cast<double>(j) / (resolution - 1);
    double b_lo, b_hi;
    if (form == GammaRangeForm::inverse_q) {
      b_lo = -2.0 * alpha1 / q;
      b_hi = 2.0 * alpha2 / q;
    } else {
      b_lo = -2.0 * q * alpha1 / mu;
      b_hi = 2.0 * q * alpha2 / mu;
    }
    for (int i = 0; i < resolution; ++i) {
      const double b =
          b_lo + (b_hi - b_lo) * static_cast<double>(i) / (resolution - 1);
      pts.push_back({b + 0.0, q});  // + 0.0 normalizes -0
    }
  }
  return UncertaintyClass::from_points(mu, std::move(pts), MemberKind::gamma);
}

namespace {

UncertaintyClass class_from_json_value(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("class: expected an object");
  if (!j.contains("mu") || !j["mu"].is_number())
    throw ConfigError("class.mu: missing or not a number");
  const double mu = j["mu"].get<double>();

  if (j.contains("points")) {
    if (!j["points"].is_array() || j["points"].empty())
      throw ConfigError("class.points: expected a nonempty array");
    std::vector<DriftVarPoint> pts;
    for (const auto& e : j["points"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError("class.points: each entry must be [b, q]");
      pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return UncertaintyClass::from_points(mu, std::move(pts));
  }
  if (j.contains("gamma")) {
    const auto& g = j["gamma"];
    for (const char* key : {"beta1", "beta2", "alpha1", "alpha2", "resolution"})
      if (!g.contains(key) || !g[key].is_number())
        throw ConfigError(std::string("class.gamma.") + key + ": missing or not a number");
    GammaRangeForm form = GammaRangeForm::inverse_q;
    if (g.contains("b_range_form")) {
      const auto s = g["b_range_form"].get<std::string>();
      if (s == "inverse_q")
        form = GammaRangeForm::inverse_q;
      else if (s == "proportional_q")
        form = GammaRangeForm::proportional_q;
      else
        throw ConfigError("class.gamma.b_range_form: unknown value '" + s + "'");
    }
    return gamma_limit_class(mu, g["beta1"].get<double>(), g["beta2"].get<double>(),
                             g["alpha1"].get<double>(), g["alpha2"].get<double>(),
                             g["resolution"].get<int>(), form);
  }
  throw ConfigError("class: need either 'points' or 'gamma'");
}

}  // namespace

UncertaintyClass class_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("class: invalid JSON: ") + e.what());
  }
  return class_from_json_value(j);
}

}  // namespace htg
