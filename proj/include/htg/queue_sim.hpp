// Discrete-event simulator of the n-th prelimit system: one deterministic
// arrival per type every 1/n, adversary-selected job-size laws, a rate-n
// server under a pluggable non-preemptive scheduler. Records diffusion-scaled
// workload/queue paths, idleness and the discounted holding cost.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "htg/hjb.hpp"
#include "htg/replication.hpp"
#include "htg/rng.hpp"
#include "htg/uncertainty.hpp"

namespace htg {

struct SystemConfig {
  long n = 100;
  std::vector<UncertaintyClass> classes;  // sorted so h[l]*mu(l) is ascending
  std::vector<double> h;                  // normalized so h[0]*mu(0) == 1
  double horizon = 25.0;
  std::uint64_t seed = 1;

  // Validates the heavy-traffic condition sum_l 1/mu_l = 1 (to 1e-12), sorts
  // types by h*mu ascending and rescales h so the lowest index is 1.
  static SystemConfig make(long n, std::vector<UncertaintyClass> classes,
                           std::vector<double> h, double horizon,
                           std::uint64_t seed);
};

enum class Scheduler {
  cmu,         // serve the waiting type of highest h*mu index, FIFO within type
  fifo_global  // serve the earliest-arrived waiting job, ties by type index
};

class AdversaryPolicy {
 public:
  enum class Kind { feedback, static_points, iid_random, static_laws };

  static AdversaryPolicy feedback(FeedbackPolicy policy);
  // One admissible point per class; simulate() rejects points outside the
  // class's point set.
  static AdversaryPolicy static_points(std::vector<DriftVarPoint> points);
  // Per class, selection weights over the class's point set (need not sum
  // to 1); one mode is drawn fresh at every arrival epoch.
  static AdversaryPolicy iid_random(std::vector<std::vector<double>> weights);
  // Fixed laws given directly, skipping the class-membership check; for
  // degenerate deterministic cases (e.g. all jobs of size 0 or 1).
  static AdversaryPolicy static_laws(std::vector<JobDistribution> laws);

  Kind kind() const { return kind_; }
  const FeedbackPolicy& feedback_policy() const { return *feedback_; }
  const std::vector<DriftVarPoint>& points() const { return points_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<JobDistribution>& laws() const { return laws_; }

 private:
  AdversaryPolicy() = default;
  Kind kind_ = Kind::static_points;
  std::optional<FeedbackPolicy> feedback_;
  std::vector<DriftVarPoint> points_;
  std::vector<std::vector<double>> weights_;
  std::vector<JobDistribution> laws_;
};

// The feedback adversary of the solved game: at each arrival it observes the
// scaled total workload at the previous epoch and picks, per class, the
// member attaining max b u' + q u'' there.
AdversaryPolicy feedback_adversary(const HJBSolution& sol,
                                   std::vector<UncertaintyClass> classes);

struct PathStats {
  long n = 0;
  double horizon = 0.0;
  // Sample grid t_k = k/n including t_0 = 0. Empty in summary mode.
  std::vector<double> t;
  std::vector<double> w_hat_tot;      // scaled total workload at t_k (after arrival)
  std::vector<double> w_hat_tot_pre;  // scaled total workload at t_{k+1}-, i.e.
                                      // just before the next arrival; this
                                      // sequence obeys the one-step reflected
                                      // recursion on increments (J_k - 1)/sqrt(n)
  std::vector<double> r_hat;          // scaled cumulative idleness at t_k
  std::vector<double> j_tot;          // total job size drawn at t_k (0 at t_0)
  std::vector<std::vector<double>> w_hat;  // [type][k]
  std::vector<std::vector<double>> q_hat;  // [type][k]

  double discounted_cost = 0.0;   // int_0^T e^-t h . Qhat_t dt, exact on the path
  std::vector<double> rsp_gap;    // per type: sup_k |Qhat - mu What|
  double high_priority_sup = 0.0; // sup_k sum_{type >= 2} What
  long clamp_count = 0;           // feedback observations clamped at x_max
};

enum class RecordMode { full, summary };

PathStats simulate(const SystemConfig& config, const AdversaryPolicy& adversary,
                   Scheduler scheduler, Rng& rng,
                   RecordMode mode = RecordMode::full);

// Per-type sup_k |Qhat^l - mu^l What^l| (recorded during the run).
std::vector<double> rsp_gap(const PathStats& stats);

// sup_k of the scaled workload summed over the high-priority types (>= 2 in
// the sorted labeling); 0 by convention when L = 1.
double high_priority_workload(const PathStats& stats);

struct SimBatch {
  EstimateSummary cost;
  std::vector<double> costs;  // per replication, in replication order
  double rsp_gap_median = 0.0;            // median over reps of max-type gap
  double high_priority_sup_median = 0.0;  // median over reps
  long clamp_count = 0;                   // summed over reps
};

// Runs independent replications on streams derived from (config.seed, rep);
// the result does not depend on thread count or execution order.
SimBatch estimate_batch(const SystemConfig& config, const AdversaryPolicy& adversary,
                        Scheduler scheduler, std::size_t replications, int jobs = 0);

// Sample mean and 95% half-width of the discounted cost.
EstimateSummary estimate_cost(const SystemConfig& config,
                              const AdversaryPolicy& adversary, Scheduler scheduler,
                              std::size_t replications, int jobs = 0);

// CSV: t,W_hat_tot,R_hat then per type W_hat_l,Q_hat_l.
void write_path_csv(const PathStats& stats, std::ostream& os);

}  // namespace htg
