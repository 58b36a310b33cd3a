// Experiment orchestration shared by the CLI and the test suites: config
// parsing/validation, HJB solves, simulation batches, convergence sweeps.
// All numbers in the emitted artifacts come from module operations; the CLI
// only formats them.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "htg/hjb.hpp"
#include "htg/mcp_sim.hpp"
#include "htg/queue_sim.hpp"

namespace htg {

struct PointsSpec {
  double mu;
  std::vector<DriftVarPoint> points;
};

struct GammaSpec {
  double mu;
  double beta1, beta2, alpha1, alpha2;
  int resolution;
  GammaRangeForm form = GammaRangeForm::inverse_q;
};

using ClassSpec = std::variant<PointsSpec, GammaSpec>;

UncertaintyClass build_class(const ClassSpec& spec);

struct AdversarySpec {
  AdversaryPolicy::Kind kind = AdversaryPolicy::Kind::feedback;
  std::vector<DriftVarPoint> points;           // static
  std::vector<std::vector<double>> weights;    // iid_random
};

struct ReportGrid {
  double v1_max = 2.0;
  double v2_max = 4.0;
  int count = 33;
};

struct ExperimentConfig {
  std::vector<ClassSpec> class_specs;
  std::vector<double> h;
  Scheduler scheduler = Scheduler::cmu;
  AdversarySpec adversary;
  std::vector<long> n_list;
  std::size_t replications = 2000;
  std::uint64_t seed = 1;
  double w0 = 0.0;
  SolverOptions solver;
  double sim_horizon = 25.0;
  double euler_step = 1e-3;
  std::size_t mcp_replications = 10000;
  ReportGrid report;
  int jobs = 0;  // CLI override, not part of the content hash

  // Throws ConfigError naming the offending field.
  static ExperimentConfig from_json_text(const std::string& text);
};

// Classes and costs in priority order (h*mu ascending), with the adversary
// spec permuted consistently.
struct SortedProblem {
  std::vector<UncertaintyClass> classes;
  std::vector<double> h;
  AdversarySpec adversary;
};
SortedProblem sort_by_priority(const ExperimentConfig& cfg);

struct SolveArtifacts {
  HJBSolution sol;
  std::vector<UncertaintyClass> classes;
  double u0 = 0.0;
  std::optional<double> w_star;  // single-class two-mode threshold
};
SolveArtifacts run_solve(const ExperimentConfig& cfg);

struct SimulateArtifacts {
  long n = 0;
  PathStats sample_path;  // replication 0, full record
  SimBatch batch;
};
SimulateArtifacts run_simulate(const ExperimentConfig& cfg);

struct McpArtifacts {
  double w0 = 0.0;
  EstimateSummary estimate;
  double u0 = 0.0;
};
McpArtifacts run_mcp(const ExperimentConfig& cfg);

struct ClassReport {
  std::vector<DriftVarPoint> points, hull, dominating, extreme_dom;
  std::vector<DecisionRegionSample> regions;
  std::optional<double> hausdorff_refined;  // gamma classes: d_H(res, 2*res)
};
std::vector<ClassReport> run_classes(const ExperimentConfig& cfg);

struct ConvergeRow {
  long n = 0;
  double cost_mean = 0.0, cost_ci95 = 0.0, abs_err = 0.0;
  double rsp_gap_median = 0.0, high_priority_sup_median = 0.0;
  long clamp_count = 0;
};
struct ConvergeArtifacts {
  double u0 = 0.0;
  std::vector<ConvergeRow> rows;
  EstimateSummary mcp;
};
ConvergeArtifacts run_converge(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace htg
