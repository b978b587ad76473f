// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_SCENARIO_IO_HPP
#define MTN_SCENARIO_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "mtn/network_solver.hpp"

namespace mtn {

/// Selector for a measure inside a solution, for distance requests:
///   {trace, arc id, t}    space trace of an arc at time t,
///   {well, vertex id}     omega at a well,
///   {outflow, arc id}     nu_1 of an arc,
///   {inflow, arc id}      nu_0 of an arc.
struct MeasureSelector {
  enum class Kind { trace, well, outflow, inflow };
  Kind kind = Kind::trace;
  std::string id;
  double t = 0.0;
};

struct DistanceRequest {
  MeasureSelector a;
  MeasureSelector b;
};

/// Output requests carried by a scenario file.
struct OutputRequest {
  std::vector<double> trace_times;
  bool check_balance = false;
  std::vector<DistanceRequest> distance_pairs;
};

/// A parsed scenario file: the scenario data plus its output requests.
struct ScenarioFile {
  Scenario scenario;
  OutputRequest outputs;
  std::string name;
};

// Parse / emit the JSON scenario format (see README for the schema). Errors
// are reported as ParseError with a line or JSON-path location.
ScenarioFile parse_scenario_text(const std::string& text,
                                 const std::string& name = "");
ScenarioFile parse_scenario_file(const std::string& path);
std::string emit_scenario(const ScenarioFile& file);

struct ReportOptions {
  std::vector<double> extra_trace_times;
  std::optional<bool> check_balance;  // overrides the file request when set
  BlOptions bl;
};

/// Deterministic machine-readable run report: identical inputs produce
/// byte-identical reports.
struct Report {
  std::string json;         // full structured report
  std::string atoms_csv;    // one row per atom
  std::string density_csv;  // one row per density piece
  bool checks_passed = true;
};

Report build_report(const ScenarioFile& file, const NetworkSolution& sol,
                    const ReportOptions& opts = {});

// Writes report.json, atoms.csv and density.csv under dir (created if needed).
void write_report(const Report& report, const std::string& dir);

// Pinned acceptance tolerances used by the report checks.
inline constexpr double kMassBalanceTol = 1e-8;
inline constexpr double kWeakResidualTol = 1e-7;
inline constexpr double kContinuityConstant = 3.0;

// Weak-form residual of a solution against the default network polynomial
// family (degree <= 3).
double weak_residual(const NetworkSolution& sol);

}  // namespace mtn

#endif  // MTN_SCENARIO_IO_HPP
