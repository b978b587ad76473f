// SPDX-License-Identifier: Apache-2.0
#include "mtn/scenario_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mtn/detail/density_builder.hpp"
#include "mtn/errors.hpp"

namespace mtn {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where, what);
}

std::string line_of_offset(const std::string& text, size_t byte) {
  size_t line = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return "line " + std::to_string(line);
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

// CSV numbers carry 17 significant digits; JSON numbers use the shortest
// round-trip representation (lossless either way).
std::string fmt_csv(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

VelocityField parse_velocity(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "velocity must be an object");
  if (j.contains("constant")) {
    return VelocityField::constant(get_number(j["constant"], where + ".constant"));
  }
  if (j.contains("affine")) {
    const json& a = j["affine"];
    if (!a.is_array() || a.size() != 2) {
      fail(where + ".affine", "expected [intercept, slope]");
    }
    return VelocityField::affine(get_number(a[0], where), get_number(a[1], where));
  }
  if (j.contains("samples")) {
    const json& s = j["samples"];
    if (!s.is_array() || s.size() < 2) {
      fail(where + ".samples", "expected at least two [x, v] pairs");
    }
    std::vector<double> xs, vs;
    for (const json& p : s) {
      if (!p.is_array() || p.size() != 2) {
        fail(where + ".samples", "expected [x, v] pairs");
      }
      xs.push_back(get_number(p[0], where));
      vs.push_back(get_number(p[1], where));
    }
    return VelocityField::sampled(std::move(xs), std::move(vs));
  }
  fail(where, "velocity must be one of {constant, affine, samples}");
}

json emit_velocity(const VelocityField& v) {
  json j;
  switch (v.kind()) {
    case VelocityField::Kind::constant:
      j["constant"] = v.affine_intercept();
      break;
    case VelocityField::Kind::affine:
      j["affine"] = {v.affine_intercept(), v.affine_slope()};
      break;
    case VelocityField::Kind::sampled: {
      json s = json::array();
      for (size_t i = 0; i < v.sample_positions().size(); ++i) {
        s.push_back({v.sample_positions()[i], v.sample_values()[i]});
      }
      j["samples"] = std::move(s);
      break;
    }
  }
  return j;
}

HybridMeasure parse_measure(const json& j, Interval domain, const std::string& where) {
  if (!j.is_object()) fail(where, "measure must be an object");
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    for (const json& a : j["atoms"]) {
      if (!a.is_array() || a.size() != 2) {
        fail(where + ".atoms", "expected [position, mass] pairs");
      }
      atoms.push_back({get_number(a[0], where), get_number(a[1], where)});
    }
  }
  // Density pieces come as [lo, hi, value] triples; they may be disjoint but
  // must not overlap.
  std::vector<std::array<double, 3>> runs;
  if (j.contains("density")) {
    for (const json& p : j["density"]) {
      if (!p.is_array() || p.size() != 3) {
        fail(where + ".density", "expected [lo, hi, value] triples");
      }
      runs.push_back({get_number(p[0], where), get_number(p[1], where),
                      get_number(p[2], where)});
    }
  }
  std::sort(runs.begin(), runs.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  detail::DensityBuilder db;
  double prev_hi = -std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    if (r[0] < prev_hi) fail(where + ".density", "pieces overlap");
    if (!(r[1] > r[0])) fail(where + ".density", "piece upper end must exceed lower end");
    prev_hi = r[1];
    db.push(r[0], r[1], r[2]);
  }
  try {
    return HybridMeasure(domain, std::move(atoms), std::move(db.breakpoints()),
                         std::move(db.values()));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

json emit_measure(const HybridMeasure& m) {
  json j;
  json atoms = json::array();
  for (const Atom& a : m.atoms()) atoms.push_back({a.position, a.mass});
  j["atoms"] = std::move(atoms);
  json density = json::array();
  const auto& bp = m.density_breakpoints();
  const auto& val = m.density_values();
  for (size_t i = 0; i < val.size(); ++i) {
    if (val[i] == 0.0) continue;
    density.push_back({bp[i], bp[i + 1], val[i]});
  }
  j["density"] = std::move(density);
  j["total_mass"] = m.total_mass();
  return j;
}

MeasureSelector parse_selector(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type")) {
    fail(where, "selector needs a 'type' field");
  }
  MeasureSelector s;
  const std::string type = j["type"].get<std::string>();
  if (type == "trace") {
    s.kind = MeasureSelector::Kind::trace;
    if (!j.contains("arc") || !j.contains("t")) {
      fail(where, "trace selector needs 'arc' and 't'");
    }
    s.id = j["arc"].get<std::string>();
    s.t = get_number(j["t"], where + ".t");
  } else if (type == "well") {
    s.kind = MeasureSelector::Kind::well;
    if (!j.contains("vertex")) fail(where, "well selector needs 'vertex'");
    s.id = j["vertex"].get<std::string>();
  } else if (type == "outflow" || type == "inflow") {
    s.kind = type == "outflow" ? MeasureSelector::Kind::outflow
                               : MeasureSelector::Kind::inflow;
    if (!j.contains("arc")) fail(where, type + " selector needs 'arc'");
    s.id = j["arc"].get<std::string>();
  } else {
    fail(where, "unknown selector type '" + type + "'");
  }
  return s;
}

json emit_selector(const MeasureSelector& s) {
  json j;
  switch (s.kind) {
    case MeasureSelector::Kind::trace:
      j["type"] = "trace";
      j["arc"] = s.id;
      j["t"] = s.t;
      break;
    case MeasureSelector::Kind::well:
      j["type"] = "well";
      j["vertex"] = s.id;
      break;
    case MeasureSelector::Kind::outflow:
      j["type"] = "outflow";
      j["arc"] = s.id;
      break;
    case MeasureSelector::Kind::inflow:
      j["type"] = "inflow";
      j["arc"] = s.id;
      break;
  }
  return j;
}

HybridMeasure resolve_selector(const MeasureSelector& s, const NetworkSolution& sol,
                               const TraceOptions& trace_opts) {
  switch (s.kind) {
    case MeasureSelector::Kind::trace:
      return sol.arc(s.id).trace_space(s.t, trace_opts);
    case MeasureSelector::Kind::well: {
      auto it = sol.well_outflows().find(s.id);
      if (it == sol.well_outflows().end()) {
        throw std::invalid_argument("'" + s.id + "' is not a well vertex");
      }
      return it->second;
    }
    case MeasureSelector::Kind::outflow:
      return sol.outflow(s.id);
    case MeasureSelector::Kind::inflow:
      return sol.inflow(s.id);
  }
  throw std::logic_error("unreachable");
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::automatic:
      return "auto";
    case Algorithm::levelwise:
      return "levelwise";
    case Algorithm::timestepped:
      return "timestepped";
  }
  return "?";
}

}  // namespace

ScenarioFile parse_scenario_text(const std::string& text, const std::string& name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(line_of_offset(text, e.byte), "JSON syntax error: " + std::string(e.what()));
  }
  if (!root.is_object()) fail("$", "scenario must be a JSON object");

  if (!root.contains("horizon")) fail("$.horizon", "missing horizon");
  const double T = get_number(root["horizon"], "$.horizon");
  if (!(T > 0.0)) fail("$.horizon", "horizon must be > 0");

  if (!root.contains("vertices") || !root["vertices"].is_array()) {
    fail("$.vertices", "missing vertex list");
  }
  std::vector<std::string> vertices;
  for (const json& v : root["vertices"]) vertices.push_back(v.get<std::string>());

  if (!root.contains("arcs") || !root["arcs"].is_array()) {
    fail("$.arcs", "missing arc list");
  }
  std::vector<NetworkArc> arcs;
  for (const json& a : root["arcs"]) {
    const std::string where = "$.arcs[" + std::to_string(arcs.size()) + "]";
    if (!a.is_object() || !a.contains("id") || !a.contains("tail") ||
        !a.contains("head")) {
      fail(where, "arc needs id, tail, head");
    }
    NetworkArc arc;
    arc.id = a["id"].get<std::string>();
    arc.tail = a["tail"].get<std::string>();
    arc.head = a["head"].get<std::string>();
    if (!a.contains("velocity")) fail(where, "arc needs a velocity");
    arc.velocity = parse_velocity(a["velocity"], where + ".velocity");
    arcs.push_back(std::move(arc));
  }

  // Arc id -> sorted position maps are needed to interpret schedule rows and
  // columns; the Network constructor sorts arcs by id, mirror that here.
  std::map<std::string, DistributionSchedule> schedules;
  if (root.contains("schedules")) {
    if (!root["schedules"].is_object()) fail("$.schedules", "must be an object");
    for (const auto& [vertex, sj] : root["schedules"].items()) {
      const std::string where = "$.schedules." + vertex;
      if (!sj.is_object() || !sj.contains("breakpoints")) {
        fail(where, "schedule needs breakpoints and matrices (or vectors)");
      }
      std::vector<double> bp;
      for (const json& b : sj["breakpoints"]) bp.push_back(get_number(b, where));
      std::vector<Matrix> pieces;
      const bool has_m = sj.contains("matrices");
      const bool has_v = sj.contains("vectors");
      if (has_m == has_v) fail(where, "provide exactly one of matrices/vectors");
      const json& rows_list = has_m ? sj["matrices"] : sj["vectors"];
      for (const json& pj : rows_list) {
        if (!pj.is_array() || pj.empty()) fail(where, "empty schedule piece");
        Matrix m;
        if (has_m) {
          m.rows = static_cast<int>(pj.size());
          m.cols = static_cast<int>(pj[0].size());
          m.a.reserve(static_cast<size_t>(m.rows) * m.cols);
          for (const json& row : pj) {
            if (static_cast<int>(row.size()) != m.cols) {
              fail(where, "ragged schedule matrix");
            }
            for (const json& x : row) m.a.push_back(get_number(x, where));
          }
        } else {
          m.rows = 1;
          m.cols = static_cast<int>(pj.size());
          for (const json& x : pj) m.a.push_back(get_number(x, where));
        }
        pieces.push_back(std::move(m));
      }
      try {
        schedules.emplace(vertex, DistributionSchedule(std::move(bp), std::move(pieces)));
      } catch (const std::invalid_argument& e) {
        fail(where, e.what());
      }
    }
  }

  ScenarioFile out;
  out.name = name;
  try {
    out.scenario.network =
        Network(std::move(vertices), std::move(arcs), std::move(schedules), T);
  } catch (const std::invalid_argument& e) {
    fail("$", e.what());
  }

  if (root.contains("initial")) {
    if (!root["initial"].is_object()) fail("$.initial", "must be an object");
    for (const auto& [arc_id, mj] : root["initial"].items()) {
      out.scenario.initial.emplace(
          arc_id, parse_measure(mj, {0.0, 1.0}, "$.initial." + arc_id));
    }
  }
  if (root.contains("inflows")) {
    if (!root["inflows"].is_object()) fail("$.inflows", "must be an object");
    for (const auto& [vertex, mj] : root["inflows"].items()) {
      out.scenario.inflows.emplace(
          vertex, parse_measure(mj, {0.0, T}, "$.inflows." + vertex));
    }
  }
  try {
    out.scenario.validate();
  } catch (const std::invalid_argument& e) {
    fail("$", e.what());
  }

  if (root.contains("outputs")) {
    const json& o = root["outputs"];
    if (!o.is_object()) fail("$.outputs", "must be an object");
    if (o.contains("trace_times")) {
      for (const json& t : o["trace_times"]) {
        const double tv = get_number(t, "$.outputs.trace_times");
        if (tv < 0.0 || tv > T) fail("$.outputs.trace_times", "time outside [0, T]");
        out.outputs.trace_times.push_back(tv);
      }
    }
    if (o.contains("check_balance")) {
      out.outputs.check_balance = o["check_balance"].get<bool>();
    }
    if (o.contains("distance_pairs")) {
      size_t k = 0;
      for (const json& pj : o["distance_pairs"]) {
        const std::string where = "$.outputs.distance_pairs[" + std::to_string(k++) + "]";
        if (!pj.is_array() || pj.size() != 2) fail(where, "expected [selector, selector]");
        out.outputs.distance_pairs.push_back(
            {parse_selector(pj[0], where), parse_selector(pj[1], where)});
      }
    }
  }
  return out;
}

ScenarioFile parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_text(buf.str(), std::filesystem::path(path).stem().string());
  } catch (ParseError& e) {
    throw ParseError(path + " " + e.where(), e.what());
  }
}

std::string emit_scenario(const ScenarioFile& file) {
  const Scenario& sc = file.scenario;
  ordered_json root;
  root["vertices"] = sc.network.vertex_ids();
  ordered_json arcs = ordered_json::array();
  for (const NetworkArc& a : sc.network.arcs()) {
    ordered_json aj;
    aj["id"] = a.id;
    aj["tail"] = a.tail;
    aj["head"] = a.head;
    aj["velocity"] = emit_velocity(a.velocity);
    arcs.push_back(std::move(aj));
  }
  root["arcs"] = std::move(arcs);
  root["horizon"] = sc.network.horizon();
  {
    ordered_json init = ordered_json::object();
    for (const auto& [arc_id, m] : sc.initial) {
      ordered_json mj = emit_measure(m);
      mj.erase("total_mass");
      init[arc_id] = std::move(mj);
    }
    root["initial"] = std::move(init);
  }
  {
    ordered_json infl = ordered_json::object();
    for (const auto& [vertex, m] : sc.inflows) {
      ordered_json mj = emit_measure(m);
      mj.erase("total_mass");
      infl[vertex] = std::move(mj);
    }
    root["inflows"] = std::move(infl);
  }
  {
    ordered_json sch = ordered_json::object();
    for (const auto& [vertex, s] : sc.network.schedules()) {
      ordered_json sj;
      sj["breakpoints"] = s.breakpoints();
      const bool vector_form = sc.network.role(vertex) == VertexRole::source;
      ordered_json pieces = ordered_json::array();
      for (const Matrix& m : s.pieces()) {
        if (vector_form) {
          ordered_json row = ordered_json::array();
          for (int c = 0; c < m.cols; ++c) row.push_back(m.at(0, c));
          pieces.push_back(std::move(row));
        } else {
          ordered_json rows = ordered_json::array();
          for (int r = 0; r < m.rows; ++r) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
            rows.push_back(std::move(row));
          }
          pieces.push_back(std::move(rows));
        }
      }
      sj[vector_form ? "vectors" : "matrices"] = std::move(pieces);
      sch[vertex] = std::move(sj);
    }
    root["schedules"] = std::move(sch);
  }
  {
    ordered_json o;
    o["trace_times"] = file.outputs.trace_times;
    o["check_balance"] = file.outputs.check_balance;
    ordered_json pairs = ordered_json::array();
    for (const DistanceRequest& d : file.outputs.distance_pairs) {
      pairs.push_back({emit_selector(d.a), emit_selector(d.b)});
    }
    o["distance_pairs"] = std::move(pairs);
    root["outputs"] = std::move(o);
  }
  return root.dump(2) + "\n";
}

double weak_residual(const NetworkSolution& sol) {
  return global_balance(sol,
                        network_polynomial_family(sol.scenario().network));
}

Report build_report(const ScenarioFile& file, const NetworkSolution& sol,
                    const ReportOptions& opts) {
  const Network& net = sol.scenario().network;
  ordered_json root;
  root["scenario"] = file.name;
  root["algorithm"] = algorithm_name(sol.algorithm_used());
  root["horizon"] = net.horizon();

  const NetworkSolution::Ledger& led = sol.ledger();
  {
    ordered_json lj;
    lj["initial_mass"] = led.initial_mass;
    lj["inflow_mass"] = led.inflow_mass;
    lj["terminal_mass"] = led.terminal_mass;
    lj["well_outflow_mass"] = led.well_outflow_mass;
    lj["defect"] = led.defect();
    root["ledger"] = std::move(lj);
  }

  std::ostringstream atoms_csv;
  std::ostringstream density_csv;
  atoms_csv << "object,id,time,position,mass\n";
  density_csv << "object,id,time,lower,upper,value\n";
  auto csv_measure = [&](const std::string& object, const std::string& id,
                         const std::string& time, const HybridMeasure& m) {
    for (const Atom& a : m.atoms()) {
      atoms_csv << object << ',' << id << ',' << time << ','
                << fmt_csv(a.position) << ',' << fmt_csv(a.mass) << '\n';
    }
    const auto& bp = m.density_breakpoints();
    const auto& val = m.density_values();
    for (size_t i = 0; i < val.size(); ++i) {
      if (val[i] == 0.0) continue;
      density_csv << object << ',' << id << ',' << time << ','
                  << fmt_csv(bp[i]) << ',' << fmt_csv(bp[i + 1]) << ','
                  << fmt_csv(val[i]) << '\n';
    }
  };

  {
    ordered_json arcs = ordered_json::object();
    for (const NetworkArc& a : net.arcs()) {
      ordered_json aj;
      aj["inflow"] = emit_measure(sol.inflow(a.id));
      aj["outflow"] = emit_measure(sol.outflow(a.id));
      aj["terminal"] = emit_measure(sol.terminal(a.id));
      csv_measure("inflow", a.id, "", sol.inflow(a.id));
      csv_measure("outflow", a.id, "", sol.outflow(a.id));
      csv_measure("terminal", a.id, "", sol.terminal(a.id));
      arcs[a.id] = std::move(aj);
    }
    root["arcs"] = std::move(arcs);
  }
  {
    ordered_json wells = ordered_json::object();
    for (const auto& [v, omega] : sol.well_outflows()) {
      wells[v] = emit_measure(omega);
      csv_measure("well", v, "", omega);
    }
    root["wells"] = std::move(wells);
  }

  std::vector<double> trace_times = file.outputs.trace_times;
  trace_times.insert(trace_times.end(), opts.extra_trace_times.begin(),
                     opts.extra_trace_times.end());
  std::sort(trace_times.begin(), trace_times.end());
  trace_times.erase(std::unique(trace_times.begin(), trace_times.end()),
                    trace_times.end());
  {
    ordered_json traces = ordered_json::array();
    for (double t : trace_times) {
      if (!(t >= 0.0 && t <= net.horizon())) {
        throw std::invalid_argument("trace time outside [0, T]");
      }
      ordered_json tj;
      tj["t"] = t;
      ordered_json per_arc = ordered_json::object();
      for (const NetworkArc& a : net.arcs()) {
        const HybridMeasure m = sol.arc(a.id).trace_space(t);
        per_arc[a.id] = emit_measure(m);
        csv_measure("trace", a.id, fmt_csv(t), m);
      }
      tj["arcs"] = std::move(per_arc);
      traces.push_back(std::move(tj));
    }
    root["traces"] = std::move(traces);
  }

  bool passed = true;
  const bool want_balance = opts.check_balance.value_or(file.outputs.check_balance);
  {
    ordered_json checks = ordered_json::object();
    if (want_balance) {
      const double defect = std::abs(led.defect());
      const double residual = weak_residual(sol);
      checks["balance_defect"] = defect;
      checks["balance_defect_tol"] = kMassBalanceTol;
      checks["weak_residual"] = residual;
      checks["weak_residual_tol"] = kWeakResidualTol;
      passed = passed && defect <= kMassBalanceTol && residual <= kWeakResidualTol;
    }
    root["checks"] = std::move(checks);
  }
  {
    ordered_json dists = ordered_json::array();
    for (const DistanceRequest& d : file.outputs.distance_pairs) {
      const HybridMeasure ma = resolve_selector(d.a, sol, {});
      const HybridMeasure mb = resolve_selector(d.b, sol, {});
      ordered_json dj;
      dj["a"] = ordered_json::parse(emit_selector(d.a).dump());
      dj["b"] = ordered_json::parse(emit_selector(d.b).dump());
      dj["bl_distance"] = bl_distance(ma, mb, opts.bl);
      dists.push_back(std::move(dj));
    }
    root["distances"] = std::move(dists);
  }
  root["checks_passed"] = passed;

  Report rep;
  rep.json = root.dump(2) + "\n";
  rep.atoms_csv = atoms_csv.str();
  rep.density_csv = density_csv.str();
  rep.checks_passed = passed;
  return rep;
}

void write_report(const Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + name + " under " + dir);
    out << body;
  };
  write("report.json", report.json);
  write("atoms.csv", report.atoms_csv);
  write("density.csv", report.density_csv);
}

}  // namespace mtn
