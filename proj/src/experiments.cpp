#include "htg/experiments.hpp"

#include <algorithm>
#include <numeric>

#include "htg/errors.hpp"
#include "json.hpp"

namespace htg {

using nlohmann::json;

UncertaintyClass build_class(const ClassSpec& spec) {
  if (const auto* p = std::get_if<PointsSpec>(&spec))
    return UncertaintyClass::from_points(p->mu, p->points);
  const auto& g = std::get<GammaSpec>(spec);
  return gamma_limit_class(g.mu, g.beta1, g.beta2, g.alpha1, g.alpha2,
                           g.resolution, g.form);
}

namespace {

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

ClassSpec parse_class_spec(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  if (!j.contains("mu")) throw ConfigError(path + ".mu: missing");
  const double mu = require_number(j["mu"], path + ".mu");
  if (j.contains("points")) {
    const auto& arr = j["points"];
    if (!arr.is_array() || arr.empty())
      throw ConfigError(path + ".points: expected a nonempty array");
    PointsSpec spec{mu, {}};
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& e = arr[i];
      if (!e.is_array() || e.size() != 2)
        throw ConfigError(path + ".points[" + std::to_string(i) + "]: expected [b, q]");
      spec.points.push_back({require_number(e[0], path + ".points.b"),
                             require_number(e[1], path + ".points.q")});
    }
    return spec;
  }
  if (j.contains("gamma")) {
    const auto& g = j["gamma"];
    if (!g.is_object()) throw ConfigError(path + ".gamma: expected an object");
    GammaSpec spec;
    spec.mu = mu;
    spec.beta1 = require_number(g.value("beta1", json()), path + ".gamma.beta1");
    spec.beta2 = require_number(g.value("beta2", json()), path + ".gamma.beta2");
    spec.alpha1 = require_number(g.value("alpha1", json()), path + ".gamma.alpha1");
    spec.alpha2 = require_number(g.value("alpha2", json()), path + ".gamma.alpha2");
    spec.resolution = static_cast<int>(
        require_number(g.value("resolution", json()), path + ".gamma.resolution"));
    if (g.contains("b_range_form")) {
      const auto s = g["b_range_form"].get<std::string>();
      if (s == "inverse_q")
        spec.form = GammaRangeForm::inverse_q;
      else if (s == "proportional_q")
        spec.form = GammaRangeForm::proportional_q;
      else
        throw ConfigError(path + ".gamma.b_range_form: unknown value '" + s + "'");
    }
    return spec;
  }
  throw ConfigError(path + ": need either 'points' or 'gamma'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");

  ExperimentConfig cfg;

  if (!j.contains("classes") || !j["classes"].is_array() || j["classes"].empty())
    throw ConfigError("classes: expected a nonempty array");
  for (std::size_t i = 0; i < j["classes"].size(); ++i)
    cfg.class_specs.push_back(
        parse_class_spec(j["classes"][i], "classes[" + std::to_string(i) + "]"));
  const std::size_t L = cfg.class_specs.size();

  if (j.contains("h")) {
    if (!j["h"].is_array() || j["h"].size() != L)
      throw ConfigError("h: expected an array with one entry per class");
    for (const auto& e : j["h"]) cfg.h.push_back(require_number(e, "h[]"));
  } else {
    cfg.h.assign(L, 1.0);
  }

  if (j.contains("scheduler")) {
    const auto s = j["scheduler"].get<std::string>();
    if (s == "cmu")
      cfg.scheduler = Scheduler::cmu;
    else if (s == "fifo_global")
      cfg.scheduler = Scheduler::fifo_global;
    else
      throw ConfigError("scheduler: unknown value '" + s + "'");
  }

  if (j.contains("adversary")) {
    const auto& a = j["adversary"];
    if (!a.is_object() || !a.contains("kind"))
      throw ConfigError("adversary: expected an object with 'kind'");
    const auto kind = a["kind"].get<std::string>();
    if (kind == "feedback") {
      cfg.adversary.kind = AdversaryPolicy::Kind::feedback;
    } else if (kind == "static") {
      cfg.adversary.kind = AdversaryPolicy::Kind::static_points;
      if (!a.contains("points") || !a["points"].is_array() || a["points"].size() != L)
        throw ConfigError("adversary.points: expected one [b, q] per class");
      for (const auto& e : a["points"]) {
        if (!e.is_array() || e.size() != 2)
          throw ConfigError("adversary.points: each entry must be [b, q]");
        cfg.adversary.points.push_back({require_number(e[0], "adversary.points.b"),
                                        require_number(e[1], "adversary.points.q")});
      }
    } else if (kind == "iid_random") {
      cfg.adversary.kind = AdversaryPolicy::Kind::iid_random;
      if (!a.contains("weights") || !a["weights"].is_array() ||
          a["weights"].size() != L)
        throw ConfigError("adversary.weights: expected one weight array per class");
      for (const auto& row : a["weights"]) {
        if (!row.is_array()) throw ConfigError("adversary.weights: expected arrays");
        std::vector<double> w;
        for (const auto& e : row) w.push_back(require_number(e, "adversary.weights[]"));
        cfg.adversary.weights.push_back(std::move(w));
      }
    } else {
      throw ConfigError("adversary.kind: unknown value '" + kind + "'");
    }
  }

  if (!j.contains("n_list") || !j["n_list"].is_array() || j["n_list"].empty())
    throw ConfigError("n_list: expected a nonempty array");
  for (const auto& e : j["n_list"]) {
    const double v = require_number(e, "n_list[]");
    if (v < 1) throw ConfigError("n_list: entries must be >= 1");
    cfg.n_list.push_back(static_cast<long>(v));
  }
  if (!std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()))
    throw ConfigError("n_list: entries must be ascending");

  if (j.contains("replications")) {
    const double r = require_number(j["replications"], "replications");
    if (r < 2) throw ConfigError("replications: must be >= 2");
    cfg.replications = static_cast<std::size_t>(r);
  }
  if (j.contains("seed"))
    cfg.seed = static_cast<std::uint64_t>(require_number(j["seed"], "seed"));
  if (j.contains("w0")) {
    cfg.w0 = require_number(j["w0"], "w0");
    if (cfg.w0 < 0.0) throw ConfigError("w0: must be >= 0");
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (!s.is_object()) throw ConfigError("solver: expected an object");
    if (s.contains("x_max")) cfg.solver.x_max = require_number(s["x_max"], "solver.x_max");
    if (s.contains("step")) cfg.solver.step = require_number(s["step"], "solver.step");
    if (s.contains("tol")) cfg.solver.tol = require_number(s["tol"], "solver.tol");
    if (s.contains("max_policy_iterations"))
      cfg.solver.max_policy_iterations = static_cast<int>(
          require_number(s["max_policy_iterations"], "solver.max_policy_iterations"));
  }
  if (j.contains("sim")) {
    const auto& s = j["sim"];
    if (!s.is_object()) throw ConfigError("sim: expected an object");
    if (s.contains("T")) cfg.sim_horizon = require_number(s["T"], "sim.T");
    if (s.contains("h_euler"))
      cfg.euler_step = require_number(s["h_euler"], "sim.h_euler");
    if (s.contains("mcp_replications"))
      cfg.mcp_replications = static_cast<std::size_t>(
          require_number(s["mcp_replications"], "sim.mcp_replications"));
    if (!(cfg.sim_horizon > 0.0)) throw ConfigError("sim.T: must be > 0");
    if (!(cfg.euler_step > 0.0)) throw ConfigError("sim.h_euler: must be > 0");
  }
  if (j.contains("report")) {
    const auto& r = j["report"];
    if (r.contains("v1_max")) cfg.report.v1_max = require_number(r["v1_max"], "report.v1_max");
    if (r.contains("v2_max")) cfg.report.v2_max = require_number(r["v2_max"], "report.v2_max");
    if (r.contains("count"))
      cfg.report.count = static_cast<int>(require_number(r["count"], "report.count"));
    if (cfg.report.count < 2) throw ConfigError("report.count: must be >= 2");
  }
  return cfg;
}

SortedProblem sort_by_priority(const ExperimentConfig& cfg) {
  std::vector<UncertaintyClass> classes;
  classes.reserve(cfg.class_specs.size());
  for (const auto& spec : cfg.class_specs) classes.push_back(build_class(spec));

  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cfg.h[a] * classes[a].mu() < cfg.h[b] * classes[b].mu();
  });

  SortedProblem out;
  out.adversary.kind = cfg.adversary.kind;
  for (std::size_t idx : order) {
    out.classes.push_back(classes[idx]);
    out.h.push_back(cfg.h[idx]);
    if (cfg.adversary.kind == AdversaryPolicy::Kind::static_points)
      out.adversary.points.push_back(cfg.adversary.points[idx]);
    if (cfg.adversary.kind == AdversaryPolicy::Kind::iid_random)
      out.adversary.weights.push_back(cfg.adversary.weights[idx]);
  }
  return out;
}

namespace {

AdversaryPolicy make_adversary(const SortedProblem& prob, const HJBSolution& sol) {
  switch (prob.adversary.kind) {
    case AdversaryPolicy::Kind::feedback:
      return feedback_adversary(sol, prob.classes);
    case AdversaryPolicy::Kind::static_points:
      return AdversaryPolicy::static_points(prob.adversary.points);
    case AdversaryPolicy::Kind::iid_random:
      return AdversaryPolicy::iid_random(prob.adversary.weights);
    default:
      throw ConfigError("adversary: unsupported kind for experiments");
  }
}

std::optional<double> maybe_threshold(const HJBSolution& sol,
                                      const std::vector<UncertaintyClass>& classes) {
  if (classes.size() != 1) return std::nullopt;
  const auto& cls = classes[0];
  if (cls.points().size() < 2 || cls.extreme_dominating().size() != 2)
    return std::nullopt;
  return two_mode_threshold(sol, cls, 0);
}

}  // namespace

SolveArtifacts run_solve(const ExperimentConfig& cfg) {
  auto prob = sort_by_priority(cfg);
  SolveArtifacts art;
  art.sol = solve_hjb(prob.classes, cfg.solver);
  art.u0 = art.sol.u[0];
  art.w_star = maybe_threshold(art.sol, prob.classes);
  art.classes = std::move(prob.classes);
  return art;
}

SimulateArtifacts run_simulate(const ExperimentConfig& cfg) {
  auto prob = sort_by_priority(cfg);
  const long n = cfg.n_list.front();
  auto system =
      SystemConfig::make(n, prob.classes, prob.h, cfg.sim_horizon, cfg.seed);

  AdversaryPolicy adversary =
      prob.adversary.kind == AdversaryPolicy::Kind::feedback
          ? make_adversary(prob, solve_hjb(prob.classes, cfg.solver))
          : make_adversary(prob, HJBSolution{});

  SimulateArtifacts art;
  art.n = n;
  Rng rng = make_stream(cfg.seed, 0);
  art.sample_path = simulate(system, adversary, cfg.scheduler, rng);
  art.batch = estimate_batch(system, adversary, cfg.scheduler, cfg.replications,
                             cfg.jobs);
  return art;
}

McpArtifacts run_mcp(const ExperimentConfig& cfg) {
  auto prob = sort_by_priority(cfg);
  auto sol = solve_hjb(prob.classes, cfg.solver);
  McpArtifacts art;
  art.w0 = cfg.w0;
  art.u0 = sol.u[sol.nearest_node(cfg.w0)];
  McpOptions opts;
  opts.step = cfg.euler_step;
  opts.horizon = cfg.sim_horizon;
  opts.jobs = cfg.jobs;
  art.estimate = estimate_mcp_value(sol, prob.classes, cfg.w0,
                                    cfg.mcp_replications, cfg.seed, opts);
  return art;
}

std::vector<ClassReport> run_classes(const ExperimentConfig& cfg) {
  std::vector<ClassReport> reports;
  std::vector<std::pair<double, double>> grid;
  for (int i = 0; i < cfg.report.count; ++i)
    for (int k = 0; k < cfg.report.count; ++k)
      grid.emplace_back(cfg.report.v1_max * i / (cfg.report.count - 1),
                        cfg.report.v2_max * k / (cfg.report.count - 1));

  for (const auto& spec : cfg.class_specs) {
    const auto cls = build_class(spec);
    ClassReport r;
    r.points = cls.points();
    r.hull = cls.hull_vertices();
    r.dominating = dominating_set(cls.points());
    r.extreme_dom = cls.extreme_dominating();
    r.regions = decision_regions(cls, grid);
    if (const auto* g = std::get_if<GammaSpec>(&spec)) {
      GammaSpec refined = *g;
      refined.resolution *= 2;
      const auto fine = build_class(refined);
      r.hausdorff_refined = hausdorff_distance(cls.points(), fine.points());
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

ConvergeArtifacts run_converge(const ExperimentConfig& cfg) {
  auto prob = sort_by_priority(cfg);
  auto sol = solve_hjb(prob.classes, cfg.solver);

  ConvergeArtifacts art;
  art.u0 = sol.u[0];
  const AdversaryPolicy adversary = make_adversary(prob, sol);

  for (long n : cfg.n_list) {
    auto system =
        SystemConfig::make(n, prob.classes, prob.h, cfg.sim_horizon, cfg.seed);
    auto batch = estimate_batch(system, adversary, cfg.scheduler,
                                cfg.replications, cfg.jobs);
    ConvergeRow row;
    row.n = n;
    row.cost_mean = batch.cost.mean;
    row.cost_ci95 = batch.cost.ci95;
    row.abs_err = std::abs(batch.cost.mean - art.u0);
    row.rsp_gap_median = batch.rsp_gap_median;
    row.high_priority_sup_median = batch.high_priority_sup_median;
    row.clamp_count = batch.clamp_count;
    art.rows.push_back(row);
  }

  McpOptions opts;
  opts.step = cfg.euler_step;
  opts.horizon = cfg.sim_horizon;
  opts.jobs = cfg.jobs;
  art.mcp = estimate_mcp_value(sol, prob.classes, 0.0, cfg.mcp_replications,
                               cfg.seed, opts);
  return art;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace htg
