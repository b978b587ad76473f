// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "mtn/errors.hpp"
#include "mtn/scenario_io.hpp"

using namespace mtn;

namespace {
const std::string kDir = MTN_SCENARIO_DIR;
}

TEST_SUITE("scenario_io") {

TEST_CASE("shipped 1-2 junction file parses to the expected scenario") {
  const ScenarioFile f = parse_scenario_file(kDir + "/junction_1_2.scn");
  CHECK(f.scenario.network.arcs().size() == 3);
  CHECK(f.scenario.network.role("V1") == VertexRole::source);
  CHECK(f.scenario.network.role("V2") == VertexRole::internal);
  CHECK(f.scenario.inflows.at("V1").atoms().size() == 1);
  CHECK(f.outputs.check_balance);
  REQUIRE(f.outputs.trace_times.size() == 1);
  CHECK(f.outputs.trace_times[0] == doctest::Approx(2.0));
  REQUIRE(f.outputs.distance_pairs.size() == 1);
  CHECK(f.outputs.distance_pairs[0].a.kind == MeasureSelector::Kind::well);
}

TEST_CASE("row sums off by more than the tolerance are rejected with location") {
  const std::string bad = R"({
    "vertices": ["V1", "V2", "V3", "V4"],
    "arcs": [
      {"id": "E1", "tail": "V1", "head": "V2", "velocity": {"constant": 1.0}},
      {"id": "E2", "tail": "V2", "head": "V3", "velocity": {"constant": 1.0}},
      {"id": "E3", "tail": "V2", "head": "V4", "velocity": {"constant": 1.0}}
    ],
    "horizon": 2.0,
    "schedules": {"V2": {"breakpoints": [0.0, 2.0], "matrices": [[[0.3, 0.6]]]}}
  })";
  try {
    parse_scenario_text(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("schedules.V2") != std::string::npos);
    CHECK(std::string(e.what()).find("sums to") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry a line number") {
  try {
    parse_scenario_text("{\n  \"vertices\": [\n  broken\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("empty inflows and zero initial data form a valid zero scenario") {
  const std::string text = R"({
    "vertices": ["A", "B"],
    "arcs": [{"id": "E1", "tail": "A", "head": "B", "velocity": {"constant": 2.0}}],
    "horizon": 1.0
  })";
  const ScenarioFile f = parse_scenario_text(text);
  const NetworkSolution sol = solve(f.scenario);
  CHECK(sol.ledger().defect() == doctest::Approx(0.0));
  CHECK(sol.outflow("E1").is_zero());
}

TEST_CASE("parse-emit round trip is stable") {
  const ScenarioFile f = parse_scenario_file(kDir + "/junction_1_2.scn");
  const std::string emitted = emit_scenario(f);
  const ScenarioFile f2 = parse_scenario_text(emitted);
  CHECK(emit_scenario(f2) == emitted);  // fixed point after one round
  CHECK(f2.scenario.network.arcs().size() == f.scenario.network.arcs().size());
  CHECK(f2.scenario.inflows.at("V1").atoms()[0].position ==
        f.scenario.inflows.at("V1").atoms()[0].position);
  CHECK(f2.outputs.trace_times == f.outputs.trace_times);
}

TEST_CASE("reports are byte-identical across repeated runs") {
  const ScenarioFile f = parse_scenario_file(kDir + "/junction_1_2.scn");
  const NetworkSolution s1 = solve(f.scenario);
  const NetworkSolution s2 = solve(f.scenario);
  const Report r1 = build_report(f, s1);
  const Report r2 = build_report(f, s2);
  CHECK(r1.json == r2.json);
  CHECK(r1.atoms_csv == r2.atoms_csv);
  CHECK(r1.density_csv == r2.density_csv);
  CHECK(r1.checks_passed);
  // Every requested section is present.
  CHECK(r1.json.find("\"ledger\"") != std::string::npos);
  CHECK(r1.json.find("\"traces\"") != std::string::npos);
  CHECK(r1.json.find("\"distances\"") != std::string::npos);
  CHECK(r1.json.find("\"balance_defect\"") != std::string::npos);
  // CSV rows exist for the well atoms.
  CHECK(r1.atoms_csv.find("well,V3") != std::string::npos);
}

TEST_CASE("report content: requested traces and distances carry the physics") {
  const ScenarioFile f = parse_scenario_file(kDir + "/junction_1_2.scn");
  const Report rep = build_report(f, solve(f.scenario));
  const auto root = nlohmann::json::parse(rep.json);
  // Requested well distance: same exit time, masses 0.3 vs 0.7, so the
  // optimal test function is the constant 1 and the distance is 0.4.
  REQUIRE(root["distances"].size() == 1);
  CHECK(root["distances"][0]["bl_distance"].get<double>() ==
        doctest::Approx(0.4).epsilon(1e-10));
  // Requested trace at t = 2: the split atom sits mid-arc on both branches.
  REQUIRE(root["traces"].size() == 1);
  const auto& tr = root["traces"][0];
  CHECK(tr["t"].get<double>() == 2.0);
  CHECK(tr["arcs"]["E2"]["atoms"][0][0].get<double>() == doctest::Approx(0.5));
  CHECK(tr["arcs"]["E2"]["atoms"][0][1].get<double>() == doctest::Approx(0.3));
  CHECK(tr["arcs"]["E3"]["atoms"][0][1].get<double>() == doctest::Approx(0.7));
  CHECK(root["ledger"]["defect"].get<double>() == 0.0);
}

TEST_CASE("unknown fields in selectors and bad trace times are rejected") {
  const std::string base = R"({
    "vertices": ["A", "B"],
    "arcs": [{"id": "E1", "tail": "A", "head": "B", "velocity": {"constant": 2.0}}],
    "horizon": 1.0,
    "outputs": {"trace_times": [5.0]}
  })";
  CHECK_THROWS_AS(parse_scenario_text(base), ParseError);
  const std::string bad_sel = R"({
    "vertices": ["A", "B"],
    "arcs": [{"id": "E1", "tail": "A", "head": "B", "velocity": {"constant": 2.0}}],
    "horizon": 1.0,
    "outputs": {"distance_pairs": [[{"type": "nope"}, {"type": "well", "vertex": "B"}]]}
  })";
  CHECK_THROWS_AS(parse_scenario_text(bad_sel), ParseError);
}

TEST_CASE("weak residual helper matches global_balance on a golden") {
  const ScenarioFile f = parse_scenario_file(kDir + "/junction_2_1.scn");
  const NetworkSolution sol = solve(f.scenario);
  CHECK(weak_residual(sol) < 1e-7);
}

TEST_CASE("velocity kinds round-trip through the format") {
  const std::string text = R"({
    "vertices": ["A", "B", "C"],
    "arcs": [
      {"id": "E1", "tail": "A", "head": "B", "velocity": {"affine": [1.0, 0.5]}},
      {"id": "E2", "tail": "B", "head": "C",
       "velocity": {"samples": [[0.0, 1.0], [0.5, 1.5], [1.0, 0.75]]}}
    ],
    "horizon": 2.0
  })";
  const ScenarioFile f = parse_scenario_text(text);
  CHECK(f.scenario.network.arc(0).velocity.kind() == VelocityField::Kind::affine);
  CHECK(f.scenario.network.arc(1).velocity.kind() == VelocityField::Kind::sampled);
  const ScenarioFile f2 = parse_scenario_text(emit_scenario(f));
  CHECK(f2.scenario.network.arc(1).velocity.sample_values()[1] == doctest::Approx(1.5));
}

}  // TEST_SUITE
