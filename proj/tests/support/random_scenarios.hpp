// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random scenarios for balance and equivalence properties:
// small DAG topologies with mixed atomic/density data, varied velocity kinds
// and random row-stochastic schedules.
#ifndef MTN_TESTS_RANDOM_SCENARIOS_HPP
#define MTN_TESTS_RANDOM_SCENARIOS_HPP

#include <array>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mtn/network_solver.hpp"

namespace mtn_tests {

inline mtn::VelocityField random_velocity(std::mt19937& rng) {
  std::uniform_real_distribution<double> speed(0.5, 2.0);
  std::uniform_int_distribution<int> kind(0, 2);
  switch (kind(rng)) {
    case 0:
      return mtn::VelocityField::constant(speed(rng));
    case 1: {
      const double a = speed(rng);
      std::uniform_real_distribution<double> slope(-0.5 * a, a);
      return mtn::VelocityField::affine(a, slope(rng));
    }
    default: {
      std::uniform_real_distribution<double> mid(0.2, 0.8);
      const double m = mid(rng);
      return mtn::VelocityField::sampled({0.0, m, 1.0},
                                         {speed(rng), speed(rng), speed(rng)});
    }
  }
}

inline mtn::HybridMeasure random_space_measure(std::mt19937& rng, bool with_density) {
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  std::uniform_int_distribution<int> n_atoms(0, 2);
  std::vector<mtn::Atom> atoms;
  for (int i = n_atoms(rng); i > 0; --i) atoms.push_back({pos(rng), mass(rng)});
  if (!with_density) {
    return mtn::HybridMeasure::from_atoms({0.0, 1.0}, std::move(atoms));
  }
  const double a = pos(rng) * 0.5;
  const double b = 0.5 + pos(rng) * 0.5;
  std::uniform_real_distribution<double> dens(0.0, 1.5);
  return mtn::HybridMeasure({0.0, 1.0}, std::move(atoms), {a, b}, {dens(rng)});
}

inline mtn::HybridMeasure random_time_measure(std::mt19937& rng, double T,
                                              bool with_density) {
  std::uniform_real_distribution<double> pos(0.0, T);
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  std::uniform_int_distribution<int> n_atoms(0, 2);
  std::vector<mtn::Atom> atoms;
  for (int i = n_atoms(rng); i > 0; --i) atoms.push_back({pos(rng), mass(rng)});
  if (!with_density) {
    return mtn::HybridMeasure::from_atoms({0.0, T}, std::move(atoms));
  }
  const double a = pos(rng) * 0.5;
  const double b = std::min(T, a + 0.2 + pos(rng) * 0.5);
  std::uniform_real_distribution<double> dens(0.0, 1.0);
  return mtn::HybridMeasure({0.0, T}, std::move(atoms), {a, b}, {dens(rng)});
}

inline mtn::DistributionSchedule random_schedule(std::mt19937& rng, int rows,
                                                 int cols, double T) {
  std::uniform_int_distribution<int> n_pieces(1, 2);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  const int pieces = n_pieces(rng);
  std::vector<double> bp{0.0};
  if (pieces == 2) bp.push_back(T * std::uniform_real_distribution<double>(0.3, 0.7)(rng));
  bp.push_back(T);
  std::vector<mtn::Matrix> ms;
  for (int p = 0; p < pieces; ++p) {
    mtn::Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      double sum = 0.0;
      std::vector<double> raw(static_cast<size_t>(cols));
      for (double& x : raw) {
        x = unif(rng);
        sum += x;
      }
      double acc = 0.0;
      for (int c = 0; c < cols; ++c) {
        // Exact row sums: the last entry absorbs the rounding.
        const double v = c + 1 == cols ? 1.0 - acc : raw[static_cast<size_t>(c)] / sum;
        m.at(r, c) = v;
        acc += v;
      }
    }
    ms.push_back(std::move(m));
  }
  return mtn::DistributionSchedule(std::move(bp), std::move(ms));
}

struct Topology {
  std::vector<std::string> vertices;
  // id, tail, head
  std::vector<std::array<std::string, 3>> arcs;
};

inline const std::vector<Topology>& topology_pool() {
  static const std::vector<Topology> pool = {
      {{"A", "B"}, {{"E1", "A", "B"}}},
      {{"A", "B", "C"}, {{"E1", "A", "B"}, {"E2", "B", "C"}}},
      {{"A", "B", "C", "D"},
       {{"E1", "A", "B"}, {"E2", "B", "C"}, {"E3", "B", "D"}}},
      {{"A", "B", "C", "D"},
       {{"E1", "A", "C"}, {"E2", "B", "C"}, {"E3", "C", "D"}}},
      {{"A", "B", "C", "D"},
       {{"E1", "A", "B"}, {"E2", "A", "C"}, {"E3", "B", "C"}, {"E4", "C", "D"}}},
      {{"A", "B", "C", "D", "E"},
       {{"E1", "A", "B"},
        {"E2", "B", "C"},
        {"E3", "B", "D"},
        {"E4", "C", "E"},
        {"E5", "D", "E"},
        {"E6", "A", "C"}}}};
  return pool;
}

inline mtn::Scenario random_scenario(std::mt19937& rng, bool atomic_only) {
  const Topology& topo = topology_pool()[std::uniform_int_distribution<size_t>(
      0, topology_pool().size() - 1)(rng)];
  const double T = std::uniform_real_distribution<double>(1.0, 4.0)(rng);

  std::vector<mtn::NetworkArc> arcs;
  for (const auto& [id, tail, head] : topo.arcs) {
    arcs.push_back({id, tail, head, random_velocity(rng)});
  }
  // Degrees for schedule shapes.
  std::map<std::string, int> din, dout;
  for (const auto& [id, tail, head] : topo.arcs) {
    ++dout[tail];
    ++din[head];
  }
  std::map<std::string, mtn::DistributionSchedule> schedules;
  for (const std::string& v : topo.vertices) {
    if (dout[v] <= 1) continue;  // implied schedule
    const int rows = din[v] == 0 ? 1 : din[v];
    schedules.emplace(v, random_schedule(rng, rows, dout[v], T));
  }
  mtn::Scenario sc{mtn::Network(topo.vertices, std::move(arcs),
                                std::move(schedules), T),
                   {},
                   {}};
  std::bernoulli_distribution coin(0.5);
  for (const auto& [id, tail, head] : topo.arcs) {
    const bool with_density = !atomic_only && coin(rng);
    auto mu0 = random_space_measure(rng, with_density);
    if (!mu0.is_zero()) sc.initial.emplace(id, std::move(mu0));
  }
  for (const std::string& v : topo.vertices) {
    if (din[v] != 0) continue;  // not a source
    const bool with_density = !atomic_only && coin(rng);
    auto inflow = random_time_measure(rng, T, with_density);
    if (!inflow.is_zero()) sc.inflows.emplace(v, std::move(inflow));
  }
  return sc;
}

}  // namespace mtn_tests

#endif  // MTN_TESTS_RANDOM_SCENARIOS_HPP
