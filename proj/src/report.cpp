#include "spin1/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace spin1::cli {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv_record(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      os << f;
      continue;
    }
    os << '"';
    for (char c : f) {
      if (c == '"') os << '"';
      os << c;
    }
    os << '"';
  }
  os << "\r\n";
}

void write_fields_csv(std::ostream& os, const Grid& grid, const StateTriple& u) {
  check_state(grid, u);
  std::vector<std::string> row;
  row = grid.dim() == 1 ? std::vector<std::string>{"x", "u1", "u0", "um1"}
                        : std::vector<std::string>{"x", "y", "u1", "u0", "um1"};
  write_csv_record(os, row);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    row.clear();
    for (int a = 0; a < grid.dim(); ++a) row.push_back(format_double(grid.coordinate(i, a)));
    for (int j = 0; j < 3; ++j) row.push_back(format_double(u[j][i]));
    write_csv_record(os, row);
  }
}

namespace {

std::vector<std::string> split_row(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, long row) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FieldDumpError("row " + std::to_string(row) + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

StateTriple read_fields_csv(std::istream& is, const Grid& grid) {
  const int dim = grid.dim();
  const std::size_t cols = static_cast<std::size_t>(dim) + 3;
  std::string line;
  if (!std::getline(is, line)) throw FieldDumpError("truncated dump: missing header");
  const auto header = split_row(line);
  const std::vector<std::string> expect = dim == 1
      ? std::vector<std::string>{"x", "u1", "u0", "um1"}
      : std::vector<std::string>{"x", "y", "u1", "u0", "um1"};
  if (header != expect) {
    if (header.size() == 4 || header.size() == 5) {
      throw FieldDumpError("shape mismatch: dump has " + std::to_string(header.size() - 3) +
                           " coordinate columns, grid has " + std::to_string(dim));
    }
    throw FieldDumpError("malformed header: '" + line + "'");
  }

  StateTriple u = StateTriple::Zero(grid.size());
  long row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    if (row >= grid.size()) {
      throw FieldDumpError("shape mismatch: dump has more than " + std::to_string(grid.size()) + " rows");
    }
    const bool complete = !is.eof();
    const auto cells = split_row(line);
    if (cells.size() != cols || !complete) {
      throw FieldDumpError("truncated dump: row " + std::to_string(row + 1) + " is incomplete");
    }
    for (int a = 0; a < dim; ++a) {
      const double x = parse_cell(cells[a], row + 1);
      const double want = grid.coordinate(row, a);
      if (std::abs(x - want) > 1e-9 * std::max(1.0, std::abs(want))) {
        throw FieldDumpError("shape mismatch: row " + std::to_string(row + 1) + " coordinate " +
                             format_double(x) + " does not match grid value " + format_double(want));
      }
    }
    for (int j = 0; j < 3; ++j) u[j][row] = parse_cell(cells[dim + j], row + 1);
    ++row;
  }
  if (row < grid.size()) {
    throw FieldDumpError("truncated dump: " + std::to_string(row) + " of " + std::to_string(grid.size()) +
                         " rows");
  }
  return u;
}

FlowStats flow_stats(const std::vector<FlowRecord>& history) {
  FlowStats s;
  s.recorded_steps = static_cast<int>(history.size());
  for (std::size_t k = 0; k < history.size(); ++k) {
    if (k > 0) s.max_energy_increase = std::max(s.max_energy_increase, history[k].energy - history[k - 1].energy);
    s.max_mass_error = std::max(s.max_mass_error, history[k].mass_error);
    s.max_magnetization_error = std::max(s.max_magnetization_error, history[k].magnetization_error);
  }
  return s;
}

nlohmann::json to_json(const VerificationReport& v) {
  nlohmann::json classes = nlohmann::json::array();
  for (auto c : v.component_class) classes.push_back(to_string(c));
  nlohmann::json j{{"regime", to_string(v.regime)},
                   {"sma_wronskian", v.sma.wronskian},
                   {"sma_gamma_error", v.sma.gamma_error},
                   {"u0_sq_minus_2u1um1", v.sma.pairing_error},
                   {"u0_mass_fraction", v.u0_mass_fraction},
                   {"component_class", classes},
                   {"dichotomy_consistent", v.dichotomy_consistent},
                   {"energy", v.energy},
                   {"verdict", v.verdict},
                   {"criterion", v.criterion}};
  if (v.regime == Regime::Degenerate) {
    j["reference_energy"] = v.reference_energy;
    j["reference_gap"] = v.reference_gap;
  }
  return j;
}

nlohmann::json to_json(const TwoComponentReport& c) {
  return {{"kappa", c.kappa},
          {"mu", c.mu},
          {"lambda", c.lambda},
          {"predicted_u1", c.predicted_u1},
          {"measured_u1", c.measured_u1},
          {"prediction_error", c.prediction_error},
          {"predicted_V", c.predicted_V},
          {"u1_variation", c.u1_variation},
          {"um1_variation", c.um1_variation},
          {"V_variation", c.V_variation},
          {"constant_state", c.constant_state},
          {"gamma_error", c.gamma_error}};
}

nlohmann::json to_json(const FlowStats& s) {
  return {{"recorded_steps", s.recorded_steps},
          {"max_energy_increase", s.max_energy_increase},
          {"max_mass_error", s.max_mass_error},
          {"max_magnetization_error", s.max_magnetization_error}};
}

nlohmann::json solve_report_json(const RunConfig& cfg, const Grid& grid, const ModelParams& p,
                                 const SolveReport& solve, const VerificationReport& verification,
                                 const std::optional<TwoComponentReport>& two_component) {
  nlohmann::json masses = nlohmann::json::array();
  for (int j = 0; j < 3; ++j) masses.push_back(integrate(grid, solve.state[j].cwiseAbs2()) / p.N);
  nlohmann::json points = nlohmann::json::array();
  for (int a = 0; a < grid.dim(); ++a) points.push_back(grid.axis(a).points);

  nlohmann::json j{
      {"name", cfg.name},
      {"problem", {{"dim", grid.dim()}, {"points", points},
                   {"boundary", grid.boundary() == Boundary::Dirichlet ? "dirichlet" : "neumann"}}},
      {"physics", {{"c_n", p.c_n}, {"c_s", p.c_s}, {"N", p.N}, {"M", p.M}}},
      {"energy",
       {{"total", solve.energy.total},
        {"kinetic", solve.energy.kinetic},
        {"potential", solve.energy.potential},
        {"density", solve.energy.density_interaction},
        {"spin", solve.energy.spin_interaction}}},
      {"multipliers", {{"mu", solve.multipliers.mu}, {"lambda", solve.multipliers.lambda}}},
      {"el_residual", solve.el_residual},
      {"constraint_error", {{"mass", solve.constraint_error[0]}, {"magnetization", solve.constraint_error[1]}}},
      {"component_mass_fraction", masses},
      {"steps", solve.steps},
      {"converged", solve.converged},
      {"diverged", solve.diverged},
      {"seed", solve.seed},
      {"diagnostics", solve.diagnostics},
      {"flow", to_json(flow_stats(solve.history))},
      {"verification", to_json(verification)}};
  if (two_component) j["two_component"] = to_json(*two_component);
  return j;
}

}  // namespace spin1::cli
