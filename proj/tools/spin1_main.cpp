// spin1: batch ground-state solves and checks of the exact ground-state structure for spin-1 condensates.

#include "spin1/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using spin1::cli::ConfigError;
using spin1::cli::ExitCode;
using spin1::cli::RunConfig;

struct Source {
  std::string config;
  std::string preset;
};

void add_source(CLI::App* cmd, Source& src) {
  auto* c = cmd->add_option("--config", src.config, "YAML run configuration");
  auto* p = cmd->add_option("--preset", src.preset, "named preset (see `presets`)");
  c->excludes(p);
}

RunConfig load(const Source& src) {
  if (!src.config.empty()) return spin1::cli::load_config(src.config);
  if (!src.preset.empty()) return spin1::cli::load_preset(src.preset);
  throw ConfigError("one of --config or --preset is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of spin-1 condensates by normalized gradient flow"};
  app.require_subcommand(1);

  Source src;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool dump = false;

  auto* solve = app.add_subcommand("solve", "solve one configuration and write a JSON report");
  auto* sweep = app.add_subcommand("sweep", "solve once per value of a swept key and write sweep.csv");
  auto* verify = app.add_subcommand("verify", "re-verify a stored field dump");
  auto* presets = app.add_subcommand("presets", "list presets or print one");

  for (auto* cmd : {solve, sweep, verify}) {
    add_source(cmd, src);
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override solver.seed");
  }
  for (auto* cmd : {solve, sweep}) cmd->add_flag("--dump-fields", dump, "write fields.csv");

  std::string sweep_key;
  std::vector<double> sweep_values;
  sweep->add_option("--key", sweep_key, "sweep key: M, c_s, c_n, points or t");
  sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',');

  std::string state_path;
  verify->add_option("--state", state_path, "field dump (fields.csv)")->required();

  std::string show;
  presets->add_option("--show", show, "print the YAML of one preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
  }

  try {
    if (presets->parsed()) {
      if (!show.empty()) {
        std::cout << spin1::cli::preset_text(show);
      } else {
        for (const auto& name : spin1::cli::preset_names()) std::cout << name << '\n';
      }
      return 0;
    }

    RunConfig cfg = spin1::cli::apply_overrides(load(src), {seed, dump});
    ExitCode code = ExitCode::Ok;
    if (solve->parsed()) {
      code = spin1::cli::run_solve(cfg, out_dir, std::cerr);
    } else if (sweep->parsed()) {
      spin1::cli::SweepBlock block;
      if (cfg.sweep) block = *cfg.sweep;
      if (!sweep_key.empty()) block.key = sweep_key;
      if (!sweep_values.empty()) block.values = sweep_values;
      if (block.key.empty() || block.values.empty()) {
        throw ConfigError("sweep: needs a key and values (config sweep block or --key/--values)");
      }
      const auto& keys = spin1::cli::sweep_keys();
      if (std::find(keys.begin(), keys.end(), block.key) == keys.end()) {
        throw ConfigError("sweep: key: expected one of M, c_s, c_n, points, t");
      }
      code = spin1::cli::run_sweep(cfg, block, out_dir, std::cerr);
    } else if (verify->parsed()) {
      code = spin1::cli::run_verify(cfg, state_path, out_dir, std::cerr);
    }
    return static_cast<int>(code);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::ConfigError);
  } catch (const spin1::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Divergence);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::ConfigError);
  }
}
