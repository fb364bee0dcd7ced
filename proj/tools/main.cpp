#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "d2dsim/core.hpp"
#include "d2dsim/selector.hpp"
#include "d2dsim/simulator.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
}

void write_run_outputs(const fs::path& dir, const d2dsim::SimConfig& cfg,
                       const d2dsim::RunResult& result, bool verbose) {
  fs::create_directories(dir);
  write_file(dir / "config.echo", [&](std::ostream& o) { d2dsim::write_config(o, cfg); });
  write_file(dir / "intervals.csv",
             [&](std::ostream& o) { d2dsim::write_intervals_csv(o, result.intervals); });
  write_file(dir / "summary.json",
             [&](std::ostream& o) { d2dsim::write_summary_json(o, cfg, result); });
  write_file(dir / "run.log",
             [&](std::ostream& o) { d2dsim::write_run_log(o, cfg, result); });
  if (verbose)
    write_file(dir / "frames.csv",
               [&](std::ostream& o) { d2dsim::write_frames_csv(o, result); });
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, bool verbose) {
  d2dsim::SimConfig cfg = d2dsim::load_config_file(config_path);
  if (seed) cfg.seed = *seed;
  cfg.validate();
  d2dsim::RunOptions options;
  options.record_frames = verbose;
  const d2dsim::RunResult result = d2dsim::run(cfg, options);
  write_run_outputs(out_dir, cfg, result, verbose);
  std::cout << "wrote " << out_dir << " (" << result.intervals.size()
            << " intervals)\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& solver) {
  const d2dsim::SelectionProblem p = d2dsim::load_instance_file(instance_path);
  d2dsim::ModeAssignment a;
  if (solver == "exact") a = d2dsim::exact_solve(p);
  else if (solver == "greedy") a = d2dsim::greedy_solve(p);
  else if (solver == "brute") a = d2dsim::brute_force_solve(p);
  else throw d2dsim::ConfigError("unknown solver: " + solver);

  std::cout << "solver " << solver << '\n';
  std::cout << "objective " << d2dsim::fmt_double(a.objective) << '\n';
  std::cout << "active " << a.links.size() << '\n';
  for (const d2dsim::ActiveLink& l : a.links) {
    double u = 0.0;
    for (const d2dsim::ProblemArc& arc : p.arcs)
      if (arc.tx == l.tx && arc.rx == l.rx)
        for (const d2dsim::LegalMode& m : arc.modes)
          if (m.mode == l.mode) u = m.utility;
    std::cout << l.tx << ' ' << l.rx << ' ' << static_cast<int>(l.mode) << ' '
              << d2dsim::fmt_double(u) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values,
              const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw d2dsim::ConfigError("cannot read config file: " + config_path);
  std::stringstream base;
  base << in.rdbuf();

  for (const std::string& value : values) {
    for (const std::uint64_t seed : seeds) {
      std::istringstream cell_text(base.str() + "\n" + param + "=" + value +
                                   "\nseed=" + std::to_string(seed) + "\n");
      d2dsim::SimConfig cfg = d2dsim::parse_config(cell_text);
      cfg.validate();
      const d2dsim::RunResult result = d2dsim::run(cfg);
      const fs::path cell_dir = fs::path(out_dir) / (param + "=" + value) /
                                ("seed=" + std::to_string(seed));
      write_run_outputs(cell_dir, cfg, result, false);
      std::cout << "wrote " << cell_dir.string() << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-cell LTE D2D mode-selection and scheduling simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "./out", instance_path, solver = "exact";
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  std::vector<std::uint64_t> sweep_seeds;
  std::optional<std::uint64_t> seed_override;
  bool verbose = false;

  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario from a config file");
  run_cmd->add_option("--config", config_path, "config file (key=value)")->required();
  run_cmd->add_option("--seed", seed_override, "override the config seed");
  run_cmd->add_option("--out", out_dir, "output directory (default ./out)");
  run_cmd->add_flag("--verbose", verbose, "also write per-subframe frames.csv");

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve a standalone mode-selection instance");
  solve_cmd->add_option("instance", instance_path, "instance file")->required();
  solve_cmd->add_option("--solver", solver, "exact | greedy | brute (default exact)");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run one config key across values x seeds");
  sweep_cmd->add_option("--config", config_path, "base config file")->required();
  sweep_cmd->add_option("--param", sweep_param, "config key to vary")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated seeds")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--out", out_dir, "output directory (default ./out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, seed_override, out_dir, verbose);
    if (*solve_cmd) return cmd_solve(instance_path, solver);
    if (*sweep_cmd)
      return cmd_sweep(config_path, sweep_param, sweep_values, sweep_seeds, out_dir);
  } catch (const d2dsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
