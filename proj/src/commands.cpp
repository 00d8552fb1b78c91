#include "spin1/commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <ostream>

namespace spin1::cli {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string() + ": cannot write output file");
  out << text;
}

int as_int(ExitCode c) { return static_cast<int>(c); }

}  // namespace

RunConfig apply_overrides(RunConfig cfg, const Overrides& o) {
  if (o.seed) cfg.solver.seed = *o.seed;
  if (o.dump_fields) cfg.outputs.dump_fields = true;
  return cfg;
}

SolverOptions reference_options(const RunConfig& cfg) {
  SolverOptions o = cfg.solver;
  o.custom_state.reset();
  o.init.reset();
  o.starts = 1;
  o.record_history = false;
  return o;
}

RunResult execute(const RunConfig& cfg) {
  const Grid grid = make_grid(cfg);
  const ModelParams p = make_params(cfg, grid);
  SolverOptions opts = make_solver_options(cfg, grid, p);
  opts.record_history = true;

  RunResult r;
  r.solve = solve_ground_state(grid, p, opts);
  r.verification = verify(grid, r.solve.state, p, reference_options(cfg));
  if (p.c_s > 0.0 && p.M != 0.0 && r.verification.component_class[1] == ComponentClass::Zero) {
    r.two_component = two_component_diagnostic(grid, r.solve.state, p, r.solve.multipliers);
  }
  r.report = solve_report_json(cfg, grid, p, r.solve, r.verification, r.two_component);
  if (r.solve.diverged || !r.solve.converged) {
    r.code = ExitCode::Divergence;
  } else if (!r.verification.verdict) {
    r.code = ExitCode::VerdictFailure;
  }
  return r;
}

ExitCode run_solve(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  const RunResult r = execute(cfg);
  write_text(out_dir / cfg.outputs.report, r.report.dump(2) + "\n");
  if (cfg.outputs.dump_fields) {
    std::ofstream out(out_dir / "fields.csv", std::ios::binary);
    if (!out) throw ConfigError((out_dir / "fields.csv").string() + ": cannot write output file");
    write_fields_csv(out, make_grid(cfg), r.solve.state);
  }
  log << cfg.name << ": energy " << format_double(r.solve.energy.total) << ", steps " << r.solve.steps
      << ", regime " << to_string(r.verification.regime) << ", verdict "
      << (r.verification.verdict ? "pass" : "fail");
  if (!r.solve.diagnostics.empty()) log << " (" << r.solve.diagnostics << ")";
  log << '\n';
  return r.code;
}

RunConfig with_sweep_value(RunConfig cfg, const std::string& key, double value) {
  if (key == "M") {
    if (!(std::abs(value) < cfg.physics.N)) throw ConfigError("sweep: M: must satisfy |M| < N");
    cfg.physics.M = value;
  } else if (key == "c_s") {
    cfg.physics.c_s = value;
  } else if (key == "c_n") {
    cfg.physics.c_n = value;
  } else if (key == "points") {
    if (value != std::floor(value) || value < Grid::kMinPoints) {
      throw ConfigError("sweep: points: expected an integer of at least " + std::to_string(Grid::kMinPoints));
    }
    for (int& n : cfg.problem.points) n = static_cast<int>(value);
    if (cfg.problem.potential == PotentialKind::Tabulated) {
      throw ConfigError("sweep: points: cannot resample a tabulated potential");
    }
  } else if (key == "t") {
    if (cfg.physics.M != 0.0) throw ConfigError("sweep: t: requires physics.M = 0");
    if (!(value >= 0.0 && value <= 1.0 / std::sqrt(2.0) + 1e-15)) {
      throw ConfigError("sweep: t: must lie in [0, 1/sqrt(2)]");
    }
    cfg.family_t = std::min(value, 1.0 / std::sqrt(2.0));
    cfg.init_state_path.reset();
    cfg.solver.init = InitKind::Custom;
  } else {
    throw ConfigError("sweep: key: unknown sweep key '" + key + "'");
  }
  return cfg;
}

ExitCode run_sweep(const RunConfig& cfg, const SweepBlock& sweep, const std::filesystem::path& out_dir,
                   std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  struct Row {
    std::string status = "ok";
    std::string message;
    std::optional<RunResult> result;
    ExitCode code = ExitCode::Ok;
  };

  std::vector<std::future<Row>> jobs;
  for (double v : sweep.values) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &sweep, v] {
      Row row;
      try {
        row.result = execute(with_sweep_value(cfg, sweep.key, v));
        row.code = row.result->code;
        if (row.code == ExitCode::Divergence) row.status = "diverged";
        if (row.code == ExitCode::VerdictFailure) row.status = "verdict_failure";
      } catch (const ConfigError& e) {
        row.status = "config_error";
        row.message = e.what();
        row.code = ExitCode::ConfigError;
      } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
        row.code = ExitCode::ConfigError;
      }
      return row;
    }));
  }

  std::ofstream out(out_dir / "sweep.csv", std::ios::binary);
  if (!out) throw ConfigError((out_dir / "sweep.csv").string() + ": cannot write output file");
  write_csv_record(out, {"key", "value", "status", "message", "energy", "mu", "lambda", "el_residual",
                         "steps", "converged", "u1_fraction", "u0_fraction", "um1_fraction",
                         "gamma_error", "wronskian", "u0_mass_fraction", "regime", "verdict"});
  ExitCode worst = ExitCode::Ok;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Row row = jobs[k].get();
    std::vector<std::string> rec{sweep.key, format_double(sweep.values[k]), row.status, row.message};
    if (row.result) {
      const auto& r = *row.result;
      const auto& fr = r.report["component_mass_fraction"];
      rec.insert(rec.end(),
                 {format_double(r.solve.energy.total), format_double(r.solve.multipliers.mu),
                  format_double(r.solve.multipliers.lambda), format_double(r.solve.el_residual),
                  std::to_string(r.solve.steps), r.solve.converged ? "true" : "false",
                  format_double(fr[0].get<double>()), format_double(fr[1].get<double>()),
                  format_double(fr[2].get<double>()), format_double(r.verification.sma.gamma_error),
                  format_double(r.verification.sma.wronskian), format_double(r.verification.u0_mass_fraction),
                  to_string(r.verification.regime), r.verification.verdict ? "true" : "false"});
    } else {
      rec.resize(18);
    }
    write_csv_record(out, rec);
    log << sweep.key << " = " << format_double(sweep.values[k]) << ": " << row.status;
    if (!row.message.empty()) log << " (" << row.message << ")";
    log << '\n';
    if (as_int(row.code) > as_int(worst)) worst = row.code;
  }
  return worst;
}

ExitCode run_verify(const RunConfig& cfg, const std::filesystem::path& state,
                    const std::filesystem::path& out_dir, std::ostream& log) {
  const Grid grid = make_grid(cfg);
  const ModelParams p = make_params(cfg, grid);
  std::ifstream in(state, std::ios::binary);
  if (!in) throw ConfigError(state.string() + ": cannot open state dump");
  StateTriple u;
  try {
    u = read_fields_csv(in, grid);
  } catch (const FieldDumpError& e) {
    throw ConfigError(state.string() + ": " + e.what());
  }
  const VerificationReport v = verify(grid, u, p, reference_options(cfg));
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "verification.json", to_json(v).dump(2) + "\n");
  log << cfg.name << ": regime " << to_string(v.regime) << ", verdict " << (v.verdict ? "pass" : "fail")
      << '\n';
  return v.verdict ? ExitCode::Ok : ExitCode::VerdictFailure;
}

}  // namespace spin1::cli
