// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <stdexcept>

#include "mtn/errors.hpp"
#include "mtn/geometry.hpp"

using namespace mtn;

namespace {

Matrix row_matrix(std::vector<double> row) {
  Matrix m(1, static_cast<int>(row.size()));
  for (size_t c = 0; c < row.size(); ++c) m.at(0, static_cast<int>(c)) = row[c];
  return m;
}

// The 1-2 junction: V1 -E1-> V2, V2 -E2-> V3, V2 -E3-> V4.
Network junction_1_2(double p, double T) {
  std::map<std::string, DistributionSchedule> sched;
  sched.emplace("V2", DistributionSchedule::constant({0.0, T}, row_matrix({p, 1.0 - p})));
  return Network({"V1", "V2", "V3", "V4"},
                 {{"E1", "V1", "V2", VelocityField::constant(1.0)},
                  {"E2", "V2", "V3", VelocityField::constant(1.0)},
                  {"E3", "V2", "V4", VelocityField::constant(1.0)}},
                 std::move(sched), T);
}

// The 2-1 junction: V1 -E1-> V3, V2 -E2-> V3, V3 -E3-> V4.
Network junction_2_1(double T) {
  return Network({"V1", "V2", "V3", "V4"},
                 {{"E1", "V1", "V3", VelocityField::constant(1.0)},
                  {"E2", "V2", "V3", VelocityField::constant(1.0)},
                  {"E3", "V3", "V4", VelocityField::constant(1.0)}},
                 {}, T);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("vertex classification on the 1-2 junction") {
  const Network net = junction_1_2(0.3, 4.0);
  const auto roles = classify_vertexes(net);
  CHECK(roles.at("V1") == VertexRole::source);
  CHECK(roles.at("V2") == VertexRole::internal);
  CHECK(roles.at("V3") == VertexRole::well);
  CHECK(roles.at("V4") == VertexRole::well);
  // Idempotence: classify twice, same result, matching the cached roles.
  CHECK(classify_vertexes(net) == roles);
  for (const auto& [v, r] : roles) CHECK(net.role(v) == r);
}

TEST_CASE("vertex classification: single arc and 2-1 junction") {
  const Network single({"V1", "V2"},
                       {{"E1", "V1", "V2", VelocityField::constant(1.0)}}, {}, 1.0);
  CHECK(single.role("V1") == VertexRole::source);
  CHECK(single.role("V2") == VertexRole::well);

  const Network merge = junction_2_1(3.0);
  CHECK(merge.role("V1") == VertexRole::source);
  CHECK(merge.role("V2") == VertexRole::source);
  CHECK(merge.role("V3") == VertexRole::internal);
  CHECK(merge.role("V4") == VertexRole::well);
}

TEST_CASE("isolated vertexes and disconnected networks are rejected") {
  CHECK_THROWS_WITH_AS(
      Network({"V1", "V2", "V3"},
              {{"E1", "V1", "V2", VelocityField::constant(1.0)}}, {}, 1.0),
      doctest::Contains("V3"), std::invalid_argument);
  CHECK_THROWS_AS(
      Network({"A1", "A2", "B1", "B2"},
              {{"E1", "A1", "A2", VelocityField::constant(1.0)},
               {"E2", "B1", "B2", VelocityField::constant(1.0)}},
              {}, 1.0),
      std::invalid_argument);
}

TEST_CASE("level partition of the 1-2 and 2-1 junctions") {
  {
    const LevelPartition part = source_distance_partition(junction_1_2(0.3, 4.0));
    REQUIRE(part.levels.size() == 2);
    CHECK(part.flagged.empty());
    REQUIRE(part.levels[0].size() == 1);
    CHECK(part.levels[0][0] == 0);  // E1
    CHECK(part.levels[1].size() == 2);  // E2, E3
  }
  {
    const LevelPartition part = source_distance_partition(junction_2_1(3.0));
    REQUIRE(part.levels.size() == 2);
    CHECK(part.levels[0].size() == 2);  // E1, E2
    CHECK(part.levels[1].size() == 1);  // E3
  }
}

TEST_CASE("level partition is disjoint and respects upstream order") {
  // Diamond with unequal path lengths: V1->V2, V1->V3, V2->V3, V3->V4.
  // V3 has a single outgoing arc, so its schedule is implied; the branching
  // source V1 needs a distribution vector.
  std::map<std::string, DistributionSchedule> sched;
  sched.emplace("V1", DistributionSchedule::constant({0.0, 1.0}, row_matrix({0.5, 0.5})));
  const Network net2({"V1", "V2", "V3", "V4"},
                     {{"E1", "V1", "V2", VelocityField::constant(1.0)},
                      {"E2", "V1", "V3", VelocityField::constant(1.0)},
                      {"E3", "V2", "V3", VelocityField::constant(1.0)},
                      {"E4", "V3", "V4", VelocityField::constant(1.0)}},
                     std::move(sched), 1.0);
  const LevelPartition part = source_distance_partition(net2);
  CHECK(part.flagged.empty());
  std::vector<int> seen;
  // E4 must appear strictly after E3 (its deepest upstream arc).
  int level_of_e3 = -1, level_of_e4 = -1;
  for (size_t l = 0; l < part.levels.size(); ++l) {
    for (int j : part.levels[l]) {
      CHECK(std::find(seen.begin(), seen.end(), j) == seen.end());
      seen.push_back(j);
      if (net2.arcs()[static_cast<size_t>(j)].id == "E3") level_of_e3 = static_cast<int>(l);
      if (net2.arcs()[static_cast<size_t>(j)].id == "E4") level_of_e4 = static_cast<int>(l);
    }
  }
  CHECK(seen.size() == 4);
  CHECK(level_of_e4 > level_of_e3);
}

TEST_CASE("cycle arcs are flagged, not fatal") {
  // One source feeding a 2-cycle: V1 -E1-> V2, V2 -E2-> V3, V3 -E3-> V2.
  std::map<std::string, DistributionSchedule> sched;
  sched.emplace("V2", DistributionSchedule::constant({0.0, 1.0},
                                                     [] {
                                                       Matrix m(2, 1);
                                                       m.at(0, 0) = 1.0;
                                                       m.at(1, 0) = 1.0;
                                                       return m;
                                                     }()));
  const Network net({"V1", "V2", "V3"},
                    {{"E1", "V1", "V2", VelocityField::constant(1.0)},
                     {"E2", "V2", "V3", VelocityField::constant(1.0)},
                     {"E3", "V3", "V2", VelocityField::constant(1.0)}},
                    std::move(sched), 1.0);
  const LevelPartition part = source_distance_partition(net);
  CHECK(part.levels.size() == 1);  // only E1 is level-ready
  CHECK(part.flagged.size() == 2);
}

TEST_CASE("no sources raises the dedicated error") {
  const Network ring({"V1", "V2"},
                     {{"E1", "V1", "V2", VelocityField::constant(1.0)},
                      {"E2", "V2", "V1", VelocityField::constant(1.0)}},
                     {}, 1.0);
  CHECK_THROWS_AS(source_distance_partition(ring), UnsupportedScenario);
}

TEST_CASE("schedule evaluation: constant, right-open pieces, 2-1 trivial rows") {
  const Network net = junction_1_2(0.3, 4.0);
  const Matrix m = net.schedule_at("V2", 1.7);
  REQUIRE(m.rows == 1);
  REQUIRE(m.cols == 2);
  CHECK(m.at(0, 0) == doctest::Approx(0.3));
  CHECK(m.at(0, 1) == doctest::Approx(0.7));

  // Two-piece schedule p = 1 on [0,1), p = 0 on [1,2]: at t = 1 the later
  // piece applies.
  const DistributionSchedule two({0.0, 1.0, 2.0},
                                 {row_matrix({1.0, 0.0}), row_matrix({0.0, 1.0})});
  CHECK(two.at(0.999).at(0, 0) == 1.0);
  CHECK(two.at(1.0).at(0, 0) == 0.0);
  CHECK(two.at(2.0).at(0, 0) == 0.0);
  CHECK_THROWS_AS(two.at(2.5), std::domain_error);

  // 2-1 junction: both incoming rows are the 1x1 matrix (1), implied without
  // an explicit schedule.
  const Network merge = junction_2_1(3.0);
  const Matrix mm = merge.schedule_at("V3", 0.5);
  REQUIRE(mm.rows == 2);
  REQUIRE(mm.cols == 1);
  CHECK(mm.at(0, 0) == 1.0);
  CHECK(mm.at(1, 0) == 1.0);
  CHECK_THROWS_AS(net.schedule_at("V2", 4.5), std::domain_error);
}

TEST_CASE("row-stochasticity is validated to 1e-12") {
  CHECK_THROWS_AS(DistributionSchedule::constant({0.0, 1.0}, row_matrix({0.5, 0.4})),
                  std::invalid_argument);
  CHECK_NOTHROW(DistributionSchedule::constant({0.0, 1.0},
                                               row_matrix({0.5, 0.5 + 5e-13})));
  CHECK_THROWS_AS(DistributionSchedule::constant({0.0, 1.0}, row_matrix({1.2, -0.2})),
                  std::invalid_argument);
}

TEST_CASE("schedule shape mismatches are rejected") {
  std::map<std::string, DistributionSchedule> sched;
  sched.emplace("V2", DistributionSchedule::constant({0.0, 4.0}, row_matrix({1.0})));
  CHECK_THROWS_AS(Network({"V1", "V2", "V3", "V4"},
                          {{"E1", "V1", "V2", VelocityField::constant(1.0)},
                           {"E2", "V2", "V3", VelocityField::constant(1.0)},
                           {"E3", "V2", "V4", VelocityField::constant(1.0)}},
                          std::move(sched), 4.0),
                  std::invalid_argument);
  // Missing schedule at a branching vertex.
  CHECK_THROWS_AS(Network({"V1", "V2", "V3", "V4"},
                          {{"E1", "V1", "V2", VelocityField::constant(1.0)},
                           {"E2", "V2", "V3", VelocityField::constant(1.0)},
                           {"E3", "V2", "V4", VelocityField::constant(1.0)}},
                          {}, 4.0),
                  std::invalid_argument);
}

TEST_CASE("self-loops are representable") {
  const Network net({"V1", "V2"},
                    {{"E1", "V1", "V2", VelocityField::constant(1.0)},
                     {"E2", "V2", "V2", VelocityField::constant(1.0)}},
                    {}, 1.0);
  CHECK(net.role("V2") == VertexRole::internal);
  const LevelPartition part = source_distance_partition(net);
  CHECK(part.flagged.size() == 1);  // the loop feeds itself
}

TEST_CASE("routing weights expose schedule entries as step functions") {
  const Network net = junction_1_2(0.3, 4.0);
  const StepFunction w = net.routing_weight("V2", 0, 2);  // E1 -> E3
  CHECK(w(0.0) == doctest::Approx(0.7));
  CHECK(w(4.0) == doctest::Approx(0.7));
}

}  // TEST_SUITE
