#include "spin1/config.hpp"

#include <map>

namespace spin1::cli {

namespace {

// Harmonic trap on [-8, 8] with 257 points; every acceptance run uses it
// except the flat-box diagnostic.
std::string trap_1d(const std::string& name, double c_s, double M, const std::string& solver,
                    const std::string& extra = "") {
  return "name: " + name +
         "\n"
         "problem:\n"
         "  dim: 1\n"
         "  extents: [[-8, 8]]\n"
         "  points: [257]\n"
         "  boundary: dirichlet\n"
         "  potential: harmonic\n"
         "physics:\n"
         "  c_n: 100\n"
         "  c_s: " + std::to_string(c_s) +
         "\n"
         "  N: 1\n"
         "  M: " + std::to_string(M) +
         "\n"
         "solver:\n"
         "  dt: 10\n"
         "  max_steps: 400000\n"
         "  energy_tol: 1.0e-12\n"
         "  residual_tol: 1.0e-9\n"
         "  seed: 1\n" +
         solver +
         "outputs:\n"
         "  report: report.json\n"
         "  dump_fields: false\n"
         "  format: json\n" +
         extra;
}

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table = [] {
    std::map<std::string, std::string> t;
    t["ferro-1d"] = trap_1d("ferro-1d", -1, 0.3, "  init: gamma_star_gaussian\n");
    t["ferro-1d-M0"] = trap_1d("ferro-1d-M0", -1, 0.0, "  init: gamma_star_gaussian\n");
    t["ferro-1d-M06"] = trap_1d("ferro-1d-M06", -1, 0.6, "  init: gamma_star_gaussian\n");
    t["antiferro-1d-M03"] = trap_1d("antiferro-1d-M03", 1, 0.3, "  init: gamma_star_gaussian\n");
    t["antiferro-1d-M06"] = trap_1d("antiferro-1d-M06", 1, 0.6, "  init: gamma_star_gaussian\n");
    t["antiferro-1d-M03-two-component"] =
        trap_1d("antiferro-1d-M03-two-component", 1, 0.3, "  init: two_component_gaussian\n");
    t["degenerate-cs1-M0"] = trap_1d("degenerate-cs1-M0", 1, 0.0, "  init: gamma_star_gaussian\n");
    t["degenerate-cs0"] = trap_1d("degenerate-cs0", 0, 0.0, "  init: gamma_star_gaussian\n");
    t["degenerate-family-t03"] =
        trap_1d("degenerate-family-t03", 1, 0.0, "  init: custom\n  family_t: 0.3\n");
    t["two-component-harmonic"] = trap_1d("two-component-harmonic", 1, 0.3, "  init: two_component_gaussian\n");
    t["two-component-flat"] =
        "name: two-component-flat\n"
        "problem:\n"
        "  dim: 1\n"
        "  extents: [[0, 1]]\n"
        "  points: [65]\n"
        "  boundary: neumann\n"
        "  potential: zero\n"
        "physics:\n"
        "  c_n: 100\n"
        "  c_s: 1\n"
        "  N: 1\n"
        "  M: 0.3\n"
        "solver:\n"
        "  dt: 10\n"
        "  energy_tol: 1.0e-12\n"
        "  residual_tol: 1.0e-9\n"
        "  init: random_positive\n"
        "  seed: 7\n"
        "outputs:\n"
        "  report: report.json\n";
    t["ferro-2d"] =
        "name: ferro-2d\n"
        "problem:\n"
        "  dim: 2\n"
        "  extents: [[-8, 8], [-8, 8]]\n"
        "  points: [65, 65]\n"
        "  boundary: dirichlet\n"
        "  potential: harmonic\n"
        "physics:\n"
        "  c_n: 100\n"
        "  c_s: -1\n"
        "  N: 1\n"
        "  M: 0.3\n"
        "solver:\n"
        "  init: gamma_star_gaussian\n"
        "outputs:\n"
        "  report: report.json\n";
    t["sweep-ferro-M"] = trap_1d("sweep-ferro-M", -1, 0.0, "  init: gamma_star_gaussian\n",
                                 "sweep:\n  key: M\n  values: [0, 0.25, 0.5, 0.75]\n");
    t["sweep-degenerate-t"] =
        trap_1d("sweep-degenerate-t", 1, 0.0, "  init: custom\n  family_t: 0\n",
                "sweep:\n  key: t\n  values: [0, 0.2, 0.5, 0.7071067811865476]\n");
    t["sweep-ferro-points"] = trap_1d("sweep-ferro-points", -1, 0.3, "  init: gamma_star_gaussian\n",
                                      "sweep:\n  key: points\n  values: [65, 129, 257]\n");
    return t;
  }();
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : presets()) out.push_back(name);
  return out;
}

std::string preset_text(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError("preset: " + name + ": unknown preset");
  return it->second;
}

RunConfig load_preset(const std::string& name) { return parse_config(preset_text(name), "preset:" + name); }

}  // namespace spin1::cli
