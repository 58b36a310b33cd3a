// Uncertainty classes over job-size laws, summarized by their (b, q) point
// sets: convex hull, dominating (Pareto-maximal) subset, the reduced argmax
// set, Hamiltonians, and class constructors.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "htg/distributions.hpp"

namespace htg {

// Counterclockwise hull vertex list starting from the lexicographically
// smallest point; collinear interior points excluded. Singletons and
// two-point inputs are returned as-is (deduplicated).
std::vector<DriftVarPoint> convex_hull(std::vector<DriftVarPoint> points);

// Minimal subset D with every input point <= some element of D in the
// componentwise order. Returned sorted by b ascending.
std::vector<DriftVarPoint> dominating_set(std::vector<DriftVarPoint> points);

// Hull vertices that are also dominating points.
std::vector<DriftVarPoint> extreme_dominating(const std::vector<DriftVarPoint>& points);

double hausdorff_distance(std::span<const DriftVarPoint> a,
                          std::span<const DriftVarPoint> b);

struct HamiltonianResult {
  double value;
  DriftVarPoint argmax;  // lexicographically smallest among maximizers
};

// max over `points` of b*v1 + q*v2. Throws on empty input.
HamiltonianResult hamiltonian_over(std::span<const DriftVarPoint> points,
                                   double v1, double v2);

enum class MemberKind { two_point, gamma };

class UncertaintyClass {
 public:
  static UncertaintyClass from_points(double mu, std::vector<DriftVarPoint> points,
                                      MemberKind kind = MemberKind::two_point);

  double mu() const { return mu_; }
  MemberKind member_kind() const { return kind_; }
  const std::vector<DriftVarPoint>& points() const { return points_; }
  const std::vector<DriftVarPoint>& hull_vertices() const { return hull_; }
  const std::vector<DriftVarPoint>& extreme_dominating() const { return reduced_; }

  bool contains(const DriftVarPoint& p, double tol = 1e-12) const;

  // A class member realizing (b, q) at level n.
  JobDistribution member(const DriftVarPoint& p, long n) const;

 private:
  double mu_ = 1.0;
  MemberKind kind_ = MemberKind::two_point;
  std::vector<DriftVarPoint> points_, hull_, reduced_;
};

// max over the class of b*v1 + q*v2. With reduced = true and v1, v2 >= 0 the
// scan runs over the extreme-dominating subset only; the value is identical
// to the full scan. Outside the nonnegative quadrant the full set is used.
HamiltonianResult hamiltonian(double v1, double v2, const UncertaintyClass& cls,
                              bool reduced = true);

struct DecisionRegionSample {
  double v1, v2;
  std::size_t label;  // index into cls.extreme_dominating()
  DriftVarPoint point;
};

// Argmax label per sample of (u', u'') space. Boundaries between labels are
// rays from the origin.
std::vector<DecisionRegionSample> decision_regions(
    const UncertaintyClass& cls, std::span<const std::pair<double, double>> v_samples);

// Which b-interval the Gamma-family limit set uses per q level.
enum class GammaRangeForm {
  inverse_q,       // b in [-2 a1 / q, 2 a2 / q]
  proportional_q,  // b in [-2 q a1 / mu, 2 q a2 / mu]
};

// Point-cloud discretization (resolution x resolution) of the limit set
// q in [mu/(2 b2), mu/(2 b1)], b in the chosen form's interval, with Gamma
// members of matching moments. Requires 0 < beta1 <= beta2, resolution >= 2,
// and -alpha1 <= alpha2 (nonempty b-interval).
UncertaintyClass gamma_limit_class(double mu, double beta1, double beta2,
                                   double alpha1, double alpha2, int resolution,
                                   GammaRangeForm form = GammaRangeForm::inverse_q);

// Loads {"mu":..., "points":[[b,q],...]} or
// {"mu":..., "gamma":{"beta1":...,"beta2":...,"alpha1":...,"alpha2":...,
//  "resolution":..., "b_range_form":"inverse_q"|"proportional_q"}}.
// Throws ConfigError (see htg/errors.hpp) naming the offending field.
UncertaintyClass class_from_json(const std::string& json_text);

}  // namespace htg
