#pragma once

// JSON run reports and CSV tables.

#include "spin1/analysis.hpp"
#include "spin1/config.hpp"
#include "spin1/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spin1::cli {

/// Malformed, truncated or mismatched field dump.
class FieldDumpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header "x[,y],u1,u0,um1", one row per grid point in storage order.
void write_fields_csv(std::ostream& os, const Grid& grid, const StateTriple& u);
StateTriple read_fields_csv(std::istream& is, const Grid& grid);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// One RFC-4180 record: fields containing a comma, quote, CR or LF are
/// quoted with inner quotes doubled; records end in CRLF.
void write_csv_record(std::ostream& os, const std::vector<std::string>& fields);

struct FlowStats {
  int recorded_steps = 0;
  double max_energy_increase = 0.0;
  double max_mass_error = 0.0;
  double max_magnetization_error = 0.0;
};

FlowStats flow_stats(const std::vector<FlowRecord>& history);

nlohmann::json to_json(const VerificationReport& v);
nlohmann::json to_json(const TwoComponentReport& c);
nlohmann::json to_json(const FlowStats& s);

nlohmann::json solve_report_json(const RunConfig& cfg, const Grid& grid, const ModelParams& p,
                                 const SolveReport& solve, const VerificationReport& verification,
                                 const std::optional<TwoComponentReport>& two_component);

}  // namespace spin1::cli
