#pragma once

// Run configuration for the batch front-end. Configs are YAML documents
// with four blocks (problem, physics, solver, outputs) and an optional
// sweep block; every key is explicit.

#include "spin1/grid.hpp"
#include "spin1/model.hpp"
#include "spin1/solver.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spin1::cli {

/// Parse or validation failure; the message carries "<source>:<line>: <key>: ...".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PotentialKind { Zero, Harmonic, Tabulated };

struct ProblemBlock {
  int dim = 1;
  std::vector<std::array<double, 2>> extents;
  std::vector<int> points;
  Boundary boundary = Boundary::Dirichlet;
  PotentialKind potential = PotentialKind::Harmonic;
  std::vector<double> tabulated;
};

struct PhysicsBlock {
  double c_n = 0.0;
  double c_s = 0.0;
  double N = 1.0;
  double M = 0.0;
};

struct OutputsBlock {
  std::string report = "report.json";
  bool dump_fields = false;
  std::string format = "json";
};

struct SweepBlock {
  std::string key;
  std::vector<double> values;
};

struct RunConfig {
  std::string name;
  ProblemBlock problem;
  PhysicsBlock physics;
  SolverOptions solver;
  /// Custom initial state: a member of the degenerate family built on the
  /// default Gaussian profile (needs M = 0) ...
  std::optional<double> family_t;
  /// ... or a field dump to load.
  std::optional<std::string> init_state_path;
  OutputsBlock outputs;
  std::optional<SweepBlock> sweep;
};

inline const std::vector<std::string>& sweep_keys() {
  static const std::vector<std::string> keys{"M", "c_s", "c_n", "points", "t"};
  return keys;
}

/// `source` names the document in error messages.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
std::string preset_text(const std::string& name);
RunConfig load_preset(const std::string& name);

Grid make_grid(const RunConfig& cfg);
ModelParams make_params(const RunConfig& cfg, const Grid& grid);
/// Solver options with any custom initial state materialized on `grid`.
SolverOptions make_solver_options(const RunConfig& cfg, const Grid& grid, const ModelParams& p);

}  // namespace spin1::cli
