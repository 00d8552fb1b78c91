#include "spin1/config.hpp"

#include "spin1/analysis.hpp"
#include "spin1/report.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace spin1::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (at && !at.Mark().is_null()) os << ':' << at.Mark().line + 1;
    os << ": " << key << ": " << msg;
    throw ConfigError(os.str());
  }

  YAML::Node block(const YAML::Node& root, const std::string& name, bool required) const {
    const YAML::Node n = root[name];
    if (!n) {
      if (required) fail(root, name, "missing required block");
      return n;
    }
    if (!n.IsMap()) fail(n, name, "expected a mapping");
    return n;
  }

  void only_keys(const YAML::Node& map, const std::string& prefix,
                 std::initializer_list<const char*> allowed) const {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, prefix + key, "unknown key");
    }
  }

  double number(const YAML::Node& map, const std::string& prefix, const std::string& key,
                std::optional<double> fallback = {}) const {
    const YAML::Node n = map[key];
    if (!n) {
      if (fallback) return *fallback;
      fail(map, prefix + key, "missing required key");
    }
    return as_number(n, prefix + key);
  }

  double as_number(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key, "expected a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, key, "expected a finite number");
      return v;
    } catch (const YAML::Exception&) {
      fail(n, key, "expected a number, got '" + n.Scalar() + "'");
    }
  }

  long integer(const YAML::Node& map, const std::string& prefix, const std::string& key,
               std::optional<long> fallback = {}) const {
    const YAML::Node n = map[key];
    if (!n) {
      if (fallback) return *fallback;
      fail(map, prefix + key, "missing required key");
    }
    return as_integer(n, prefix + key);
  }

  long as_integer(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, key, "expected an integer");
    try {
      return n.as<long>();
    } catch (const YAML::Exception&) {
      fail(n, key, "expected an integer, got '" + n.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& map, const std::string& prefix, const std::string& key,
                    std::optional<std::string> fallback = {}) const {
    const YAML::Node n = map[key];
    if (!n) {
      if (fallback) return *fallback;
      fail(map, prefix + key, "missing required key");
    }
    if (!n.IsScalar()) fail(n, prefix + key, "expected a string");
    return n.Scalar();
  }

  bool boolean(const YAML::Node& map, const std::string& prefix, const std::string& key,
               bool fallback) const {
    const YAML::Node n = map[key];
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, prefix + key, "expected true or false");
    }
  }

 private:
  std::string source_;
};

void parse_problem(const Reader& rd, const YAML::Node& node, ProblemBlock& pb) {
  rd.only_keys(node, "problem.", {"dim", "extents", "points", "boundary", "potential"});
  pb.dim = static_cast<int>(rd.integer(node, "problem.", "dim", 1));
  if (pb.dim != 1 && pb.dim != 2) rd.fail(node["dim"], "problem.dim", "must be 1 or 2");

  const YAML::Node ext = node["extents"];
  if (!ext) rd.fail(node, "problem.extents", "missing required key");
  if (!ext.IsSequence() || ext.size() == 0) rd.fail(ext, "problem.extents", "expected a list");
  // [lo, hi] is shorthand for the same interval on every axis.
  const bool shorthand = ext[0].IsScalar();
  for (int a = 0; a < pb.dim; ++a) {
    const YAML::Node iv = shorthand ? ext : (a < static_cast<int>(ext.size()) ? ext[a] : YAML::Node());
    if (!iv || !iv.IsSequence() || iv.size() != 2) {
      rd.fail(iv ? iv : ext, "problem.extents", "expected one [lo, hi] pair per axis");
    }
    const double lo = rd.as_number(iv[0], "problem.extents");
    const double hi = rd.as_number(iv[1], "problem.extents");
    if (!(hi > lo)) rd.fail(iv, "problem.extents", "hi must exceed lo");
    pb.extents.push_back({lo, hi});
  }
  if (!shorthand && static_cast<int>(ext.size()) != pb.dim) {
    rd.fail(ext, "problem.extents", "expected " + std::to_string(pb.dim) + " intervals");
  }

  const YAML::Node pts = node["points"];
  if (!pts) rd.fail(node, "problem.points", "missing required key");
  for (int a = 0; a < pb.dim; ++a) {
    const YAML::Node n = pts.IsSequence() ? pts[a] : pts;
    if (!n) rd.fail(pts, "problem.points", "expected one count per axis");
    const long v = rd.as_integer(n, "problem.points");
    if (v < Grid::kMinPoints) {
      rd.fail(n, "problem.points", "need at least " + std::to_string(Grid::kMinPoints) + " points");
    }
    pb.points.push_back(static_cast<int>(v));
  }

  const std::string bc = rd.text(node, "problem.", "boundary", std::string("dirichlet"));
  if (bc == "dirichlet") {
    pb.boundary = Boundary::Dirichlet;
  } else if (bc == "neumann") {
    pb.boundary = Boundary::Neumann;
  } else {
    rd.fail(node["boundary"], "problem.boundary", "expected dirichlet or neumann");
  }

  const YAML::Node pot = node["potential"];
  if (!pot || (pot.IsScalar() && pot.Scalar() == "harmonic")) {
    pb.potential = PotentialKind::Harmonic;
  } else if (pot.IsScalar() && pot.Scalar() == "zero") {
    pb.potential = PotentialKind::Zero;
  } else if (pot.IsMap() && pot["tabulated"]) {
    rd.only_keys(pot, "problem.potential.", {"tabulated"});
    const YAML::Node tab = pot["tabulated"];
    if (!tab.IsSequence()) rd.fail(tab, "problem.potential.tabulated", "expected a list of values");
    for (const auto& v : tab) pb.tabulated.push_back(rd.as_number(v, "problem.potential.tabulated"));
    long total = 1;
    for (int p : pb.points) total *= p;
    if (static_cast<long>(pb.tabulated.size()) != total) {
      rd.fail(tab, "problem.potential.tabulated",
              "expected " + std::to_string(total) + " values, got " + std::to_string(pb.tabulated.size()));
    }
    pb.potential = PotentialKind::Tabulated;
  } else {
    rd.fail(pot, "problem.potential", "expected zero, harmonic or {tabulated: [...]}");
  }
}

void parse_solver(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  SolverOptions& o = cfg.solver;
  if (!node) return;
  rd.only_keys(node, "solver.", {"dt", "max_steps", "energy_tol", "residual_tol", "seed", "init",
                                 "family_t", "init_state", "starts", "dt_min"});
  o.dt = rd.number(node, "solver.", "dt", o.dt);
  if (!(o.dt > 0.0)) rd.fail(node["dt"], "solver.dt", "must be positive");
  o.dt_min = rd.number(node, "solver.", "dt_min", o.dt_min);
  if (!(o.dt_min > 0.0)) rd.fail(node["dt_min"], "solver.dt_min", "must be positive");
  const long steps = rd.integer(node, "solver.", "max_steps", o.max_steps);
  if (steps <= 0) rd.fail(node["max_steps"], "solver.max_steps", "must be positive");
  o.max_steps = static_cast<int>(steps);
  o.energy_tol = rd.number(node, "solver.", "energy_tol", o.energy_tol);
  if (!(o.energy_tol > 0.0)) rd.fail(node["energy_tol"], "solver.energy_tol", "must be positive");
  o.residual_tol = rd.number(node, "solver.", "residual_tol", o.residual_tol);
  if (!(o.residual_tol > 0.0)) rd.fail(node["residual_tol"], "solver.residual_tol", "must be positive");
  const long seed = rd.integer(node, "solver.", "seed", static_cast<long>(o.seed));
  if (seed < 0) rd.fail(node["seed"], "solver.seed", "must be nonnegative");
  o.seed = static_cast<std::uint64_t>(seed);
  const long starts = rd.integer(node, "solver.", "starts", 1);
  if (starts < 1) rd.fail(node["starts"], "solver.starts", "must be at least 1");
  o.starts = static_cast<int>(starts);

  static const std::map<std::string, std::optional<InitKind>> kinds{
      {"auto", std::nullopt},
      {"gamma_star_gaussian", InitKind::GammaStarGaussian},
      {"two_component_gaussian", InitKind::TwoComponentGaussian},
      {"random_positive", InitKind::RandomPositive},
      {"custom", InitKind::Custom}};
  const std::string init = rd.text(node, "solver.", "init", std::string("auto"));
  const auto it = kinds.find(init);
  if (it == kinds.end()) {
    rd.fail(node["init"], "solver.init",
            "expected auto, gamma_star_gaussian, two_component_gaussian, random_positive or custom");
  }
  o.init = it->second;
  if (node["family_t"]) cfg.family_t = rd.number(node, "solver.", "family_t");
  if (node["init_state"]) cfg.init_state_path = rd.text(node, "solver.", "init_state");
  if (o.init == InitKind::Custom) {
    if (cfg.family_t.has_value() == cfg.init_state_path.has_value()) {
      rd.fail(node["init"], "solver.init", "custom needs exactly one of family_t or init_state");
    }
    if (cfg.family_t) {
      const double t = *cfg.family_t;
      if (!(t >= 0.0 && t <= 1.0 / std::numbers::sqrt2)) {
        rd.fail(node["family_t"], "solver.family_t", "must lie in [0, 1/sqrt(2)]");
      }
      if (cfg.physics.M != 0.0) rd.fail(node["family_t"], "solver.family_t", "requires physics.M = 0");
    }
  } else if (cfg.family_t || cfg.init_state_path) {
    rd.fail(node, "solver.init", "family_t and init_state need init: custom");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": syntax: " + e.msg);
  }
  if (!root || !root.IsMap()) throw ConfigError(source + ": expected a mapping at top level");
  rd.only_keys(root, "", {"name", "problem", "physics", "solver", "outputs", "sweep"});

  RunConfig cfg;
  cfg.name = rd.text(root, "", "name", std::string("run"));
  parse_problem(rd, rd.block(root, "problem", true), cfg.problem);

  const YAML::Node phys = rd.block(root, "physics", true);
  rd.only_keys(phys, "physics.", {"c_n", "c_s", "N", "M"});
  cfg.physics.c_n = rd.number(phys, "physics.", "c_n");
  cfg.physics.c_s = rd.number(phys, "physics.", "c_s");
  cfg.physics.N = rd.number(phys, "physics.", "N", 1.0);
  cfg.physics.M = rd.number(phys, "physics.", "M", 0.0);
  if (!(cfg.physics.N > 0.0)) rd.fail(phys["N"], "physics.N", "must be positive");
  if (!(std::abs(cfg.physics.M) < cfg.physics.N)) {
    rd.fail(phys["M"] ? phys["M"] : phys, "physics.M", "must satisfy |M| < N");
  }

  parse_solver(rd, rd.block(root, "solver", false), cfg);

  if (const YAML::Node out = rd.block(root, "outputs", false)) {
    rd.only_keys(out, "outputs.", {"report", "dump_fields", "format"});
    cfg.outputs.report = rd.text(out, "outputs.", "report", cfg.outputs.report);
    cfg.outputs.dump_fields = rd.boolean(out, "outputs.", "dump_fields", false);
    cfg.outputs.format = rd.text(out, "outputs.", "format", cfg.outputs.format);
    if (cfg.outputs.format != "json") rd.fail(out["format"], "outputs.format", "only json is supported");
  }

  if (const YAML::Node sw = rd.block(root, "sweep", false)) {
    rd.only_keys(sw, "sweep.", {"key", "values"});
    SweepBlock s;
    s.key = rd.text(sw, "sweep.", "key");
    const auto& keys = sweep_keys();
    if (std::find(keys.begin(), keys.end(), s.key) == keys.end()) {
      rd.fail(sw["key"], "sweep.key", "expected one of M, c_s, c_n, points, t");
    }
    const YAML::Node vals = sw["values"];
    if (!vals || !vals.IsSequence() || vals.size() == 0) {
      rd.fail(vals ? vals : sw, "sweep.values", "expected a non-empty list");
    }
    for (const auto& v : vals) s.values.push_back(rd.as_number(v, "sweep.values"));
    if (s.key == "t" && cfg.physics.M != 0.0) rd.fail(sw["key"], "sweep.key", "t sweeps require physics.M = 0");
    cfg.sweep = s;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Grid make_grid(const RunConfig& cfg) {
  return build_grid(cfg.problem.dim, cfg.problem.extents, cfg.problem.points, cfg.problem.boundary);
}

ModelParams make_params(const RunConfig& cfg, const Grid& grid) {
  ModelParams p;
  p.c_n = cfg.physics.c_n;
  p.c_s = cfg.physics.c_s;
  p.N = cfg.physics.N;
  p.M = cfg.physics.M;
  switch (cfg.problem.potential) {
    case PotentialKind::Zero:
      p.V = RealField::Zero(grid.size());
      break;
    case PotentialKind::Harmonic:
      p.V = RealField::Zero(grid.size());
      for (int a = 0; a < grid.dim(); ++a) p.V += grid.coordinates(a).cwiseAbs2();
      break;
    case PotentialKind::Tabulated:
      p.V = Eigen::Map<const RealField>(cfg.problem.tabulated.data(),
                                        static_cast<Eigen::Index>(cfg.problem.tabulated.size()));
      break;
  }
  p.validate(grid);
  return p;
}

SolverOptions make_solver_options(const RunConfig& cfg, const Grid& grid, const ModelParams& p) {
  SolverOptions o = cfg.solver;
  if (o.init == InitKind::Custom) {
    if (cfg.family_t) {
      o.custom_state = degenerate_family(grid, gaussian_profile(grid, p.N), *cfg.family_t, p);
    } else if (cfg.init_state_path) {
      std::ifstream in(*cfg.init_state_path);
      if (!in) throw ConfigError(*cfg.init_state_path + ": cannot open initial state");
      try {
        o.custom_state = read_fields_csv(in, grid);
      } catch (const FieldDumpError& e) {
        throw ConfigError(*cfg.init_state_path + ": " + e.what());
      }
    }
  }
  return o;
}

}  // namespace spin1::cli
