#pragma once

// The batch verbs behind the command-line tool. Each returns a process exit code.

#include "spin1/analysis.hpp"
#include "spin1/config.hpp"
#include "spin1/report.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace spin1::cli {

enum class ExitCode : int { Ok = 0, ConfigError = 1, Divergence = 2, VerdictFailure = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  bool dump_fields = false;
};

RunConfig apply_overrides(RunConfig cfg, const Overrides& o);

/// Options used for the single-mode reference solve inside verify; shared
/// by solve and verify so both produce the same verdict.
SolverOptions reference_options(const RunConfig& cfg);

struct RunResult {
  SolveReport solve;
  VerificationReport verification;
  std::optional<TwoComponentReport> two_component;
  nlohmann::json report;
  ExitCode code = ExitCode::Ok;
};

/// Solve and verify without touching the filesystem (other than reading a
/// custom initial state). Config problems throw ConfigError.
RunResult execute(const RunConfig& cfg);

ExitCode run_solve(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// Writes sweep.csv with one row per value; failing rows are recorded and
/// the sweep continues. The exit code is the largest row code.
ExitCode run_sweep(const RunConfig& cfg, const SweepBlock& sweep, const std::filesystem::path& out_dir,
                   std::ostream& log);

/// Re-verifies a field dump and writes verification.json.
ExitCode run_verify(const RunConfig& cfg, const std::filesystem::path& state,
                    const std::filesystem::path& out_dir, std::ostream& log);

RunConfig with_sweep_value(RunConfig cfg, const std::string& key, double value);

}  // namespace spin1::cli
