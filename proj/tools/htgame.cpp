// htgame: solve the workload game's limit equation, simulate the prelimit
// queue and the limiting diffusion, and emit plot-ready CSV/JSON artifacts.
//
//   htgame <solve|simulate|mcp|classes|converge> --config cfg.json [--out DIR]
//          [--seed N] [--jobs N]
//
// Outputs land in <out>/run-<confighash>/. Exit codes: 0 ok, 2 config error,
// 3 solver non-convergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "htg/errors.hpp"
#include "htg/experiments.hpp"
#include "htg/format.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw htg::ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

std::string points_csv(const std::vector<htg::DriftVarPoint>& pts) {
  std::string s = "b,q\n";
  for (const auto& p : pts)
    s += htg::fmt_full(p.b) + "," + htg::fmt_full(p.q) + "\n";
  return s;
}

json summary_of(const htg::EstimateSummary& e) {
  return json{{"mean", e.mean}, {"ci95", e.ci95}, {"replications", e.count}};
}

struct Cli {
  std::string config_path;
  std::string out_dir = "out";
  long long seed_override = -1;
  int jobs = 0;
};

fs::path prepare_run_dir(const Cli& cli, htg::ExperimentConfig& cfg,
                         std::string& effective_config) {
  json j = json::parse(read_file(cli.config_path));
  if (cli.seed_override >= 0) j["seed"] = cli.seed_override;
  effective_config = j.dump(2);
  cfg = htg::ExperimentConfig::from_json_text(effective_config);
  cfg.jobs = cli.jobs;

  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(htg::fnv1a64(effective_config)));
  fs::path dir = fs::path(cli.out_dir) / (std::string("run-") + hash);
  fs::create_directories(dir);
  write_file(dir / "config.json", effective_config);
  return dir;
}

int cmd_solve(const Cli& cli) {
  htg::ExperimentConfig cfg;
  std::string raw;
  fs::path dir = prepare_run_dir(cli, cfg, raw);
  auto art = htg::run_solve(cfg);

  std::ostringstream csv;
  htg::write_solution_csv(art.sol, csv);
  write_file(dir / "hjb_solution.csv", csv.str());

  json summary{{"u0", art.u0},
               {"residual", art.sol.residual},
               {"iterations", art.sol.iterations}};
  if (art.w_star) summary["w_star"] = *art.w_star;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_simulate(const Cli& cli) {
  htg::ExperimentConfig cfg;
  std::string raw;
  fs::path dir = prepare_run_dir(cli, cfg, raw);
  auto art = htg::run_simulate(cfg);

  std::ostringstream csv;
  htg::write_path_csv(art.sample_path, csv);
  write_file(dir / "path.csv", csv.str());

  json summary{{"n", art.n},
               {"cost_mean", art.batch.cost.mean},
               {"cost_ci95", art.batch.cost.ci95},
               {"rsp_gap_median", art.batch.rsp_gap_median},
               {"high_priority_sup_median", art.batch.high_priority_sup_median},
               {"clamp_count", art.batch.clamp_count}};
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_mcp(const Cli& cli) {
  htg::ExperimentConfig cfg;
  std::string raw;
  fs::path dir = prepare_run_dir(cli, cfg, raw);
  auto art = htg::run_mcp(cfg);
  json summary{{"w0", art.w0},
               {"mean", art.estimate.mean},
               {"ci95", art.estimate.ci95},
               {"h", cfg.euler_step},
               {"T", cfg.sim_horizon},
               {"replications", art.estimate.count},
               {"u_at_w0", art.u0}};
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_classes(const Cli& cli) {
  htg::ExperimentConfig cfg;
  std::string raw;
  fs::path dir = prepare_run_dir(cli, cfg, raw);
  auto reports = htg::run_classes(cfg);

  json summary = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const std::string stem = "class_" + std::to_string(i + 1);
    write_file(dir / (stem + "_points.csv"), points_csv(r.points));
    write_file(dir / (stem + "_hull.csv"), points_csv(r.hull));
    write_file(dir / (stem + "_dominating.csv"), points_csv(r.dominating));
    write_file(dir / (stem + "_extreme_dominating.csv"), points_csv(r.extreme_dom));

    std::string regions = "v1,v2,label,b,q\n";
    for (const auto& s : r.regions)
      regions += htg::fmt_full(s.v1) + "," + htg::fmt_full(s.v2) + "," +
                 std::to_string(s.label) + "," + htg::fmt_full(s.point.b) + "," +
                 htg::fmt_full(s.point.q) + "\n";
    write_file(dir / (stem + "_decision_regions.csv"), regions);

    json entry{{"points", r.points.size()},
               {"hull_vertices", r.hull.size()},
               {"dominating", r.dominating.size()},
               {"extreme_dominating", r.extreme_dom.size()}};
    if (r.hausdorff_refined) entry["hausdorff_refined"] = *r.hausdorff_refined;
    summary.push_back(entry);
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_converge(const Cli& cli) {
  htg::ExperimentConfig cfg;
  std::string raw;
  fs::path dir = prepare_run_dir(cli, cfg, raw);
  auto art = htg::run_converge(cfg);

  std::string csv =
      "n,cost_mean,cost_ci95,abs_err,rsp_gap_median,high_priority_sup_median,"
      "clamp_count\n";
  for (const auto& row : art.rows)
    csv += std::to_string(row.n) + "," + htg::fmt_full(row.cost_mean) + "," +
           htg::fmt_full(row.cost_ci95) + "," + htg::fmt_full(row.abs_err) + "," +
           htg::fmt_full(row.rsp_gap_median) + "," +
           htg::fmt_full(row.high_priority_sup_median) + "," +
           std::to_string(row.clamp_count) + "\n";
  write_file(dir / "converge.csv", csv);

  json summary{{"u0", art.u0}, {"mcp", summary_of(art.mcp)}};
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workload-game limit solver and simulators"};
  app.require_subcommand(1);

  Cli cli;
  int (*handler)(const Cli&) = nullptr;
  for (auto [name, fn, desc] :
       {std::tuple{"solve", &cmd_solve, "solve the limit equation, emit CSV + summary"},
        std::tuple{"simulate", &cmd_simulate, "prelimit queue batch at the first n"},
        std::tuple{"mcp", &cmd_mcp, "limiting-diffusion value estimate"},
        std::tuple{"classes", &cmd_classes, "class geometry and decision regions"},
        std::tuple{"converge", &cmd_converge, "cost vs n sweep against the limit value"}}) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", cli.config_path, "JSON config path")->required();
    sub->add_option("--out", cli.out_dir, "output directory (default: out)");
    sub->add_option("--seed", cli.seed_override, "override the config seed");
    sub->add_option("--jobs", cli.jobs, "replication worker threads (0 = auto)");
    sub->callback([&handler, fn = fn] { handler = fn; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return handler(cli);
  } catch (const htg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const htg::SolverError& e) {
    std::cerr << "solver error: " << e.what()
              << " (last residual " << e.last_residual << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
