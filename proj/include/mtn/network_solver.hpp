// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_NETWORK_SOLVER_HPP
#define MTN_NETWORK_SOLVER_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtn/arc_solver.hpp"
#include "mtn/geometry.hpp"

namespace mtn {

/// A network plus its data: initial measure per arc (missing arcs carry the
/// zero measure) and inflow measure per source vertex.
struct Scenario {
  Network network;
  std::map<std::string, HybridMeasure> initial;  // arc id -> measure on [0,1]
  std::map<std::string, HybridMeasure> inflows;  // source vertex id -> on [0,T]

  const HybridMeasure& initial_for(const std::string& arc_id) const;
  HybridMeasure inflow_for(const std::string& vertex_id) const;
  void validate() const;  // throws std::invalid_argument
};

enum class Algorithm { automatic, levelwise, timestepped };

struct SolveOptions {
  Algorithm algorithm = Algorithm::automatic;
  // Time-stepping window; must be positive and strictly below the minimum
  // arc traversal time. Unset selects 0.9 * min_j tau_j(0).
  std::optional<double> time_step;
  // Worker cap for per-level / per-window arc solves; <= 0 reads
  // MTN_MAX_WORKERS, then the hardware concurrency.
  int max_workers = 0;
  TraceOptions trace;
};

/// Solved network problem: the per-arc solutions (full-horizon problems with
/// the assembled junction inflows), the materialized traces, the per-well
/// aggregates and the mass ledger.
class NetworkSolution {
 public:
  struct Ledger {
    double initial_mass = 0.0;
    double inflow_mass = 0.0;
    double terminal_mass = 0.0;
    double well_outflow_mass = 0.0;
    double defect() const {
      return initial_mass + inflow_mass - terminal_mass - well_outflow_mass;
    }
  };

  const Scenario& scenario() const { return *scenario_; }
  Algorithm algorithm_used() const { return algorithm_; }

  const ArcSolution& arc(const std::string& arc_id) const;
  const HybridMeasure& inflow(const std::string& arc_id) const;    // nu_0^j
  const HybridMeasure& outflow(const std::string& arc_id) const;   // nu_1^j
  const HybridMeasure& terminal(const std::string& arc_id) const;  // mu_T^j
  // omega^i per well vertex.
  const std::map<std::string, HybridMeasure>& well_outflows() const {
    return wells_;
  }
  const Ledger& ledger() const { return ledger_; }

 private:
  friend NetworkSolution solve_levelwise(const Scenario&, const SolveOptions&);
  friend NetworkSolution solve_timestepped(const Scenario&, const SolveOptions&);

  // Final assembly shared by both algorithms once the per-arc inflows are
  // known: solve every full-horizon arc problem and collect the traces.
  static NetworkSolution materialize(std::shared_ptr<const Scenario> sc,
                                     Algorithm algorithm,
                                     std::vector<HybridMeasure> inflows,
                                     const SolveOptions& opts);

  std::shared_ptr<const Scenario> scenario_;
  Algorithm algorithm_ = Algorithm::levelwise;
  std::vector<ArcSolution> arcs_;          // by arc index
  std::vector<HybridMeasure> outflows_;    // by arc index
  std::vector<HybridMeasure> terminals_;   // by arc index
  std::map<std::string, HybridMeasure> wells_;
  Ledger ledger_;
};

// Two constructions: induction over the source-distance levels
// (DAG scenarios with sources), and iteration over time windows shorter than
// the minimum arc traversal time (any topology). On scenarios both handle,
// the results coincide.
NetworkSolution solve_levelwise(const Scenario& sc, const SolveOptions& opts = {});
NetworkSolution solve_timestepped(const Scenario& sc, const SolveOptions& opts = {});
// Levelwise when the level construction covers every data-carrying arc,
// otherwise time-stepped.
NetworkSolution solve(const Scenario& sc, const SolveOptions& opts = {});

/// Per-arc C^1 test functions that agree at shared vertexes (continuity on
/// the network). Vertex agreement is validated before use.
struct NetworkTestFunction {
  std::map<std::string, SpaceTimeTestFunction> per_arc;  // arc id -> phi_j
  std::string name;
};

// A default family: constants, time polynomials, vertex-potential
// interpolants and per-arc bubbles, all continuous on the network.
std::vector<NetworkTestFunction> network_polynomial_family(const Network& net,
                                                           int max_degree = 3);

// max over the family of the global weak-form residual
// |<mu, dt phi + v dx phi> - (<mu_T - mu_0, phi> + <omega - sigma, phi>)|.
double global_balance(const NetworkSolution& sol,
                      const std::vector<NetworkTestFunction>& phis);

struct ContinuityEstimate {
  double lhs = 0.0;  // sum of terminal + well BL distances
  double rhs = 0.0;  // sum of input BL distances
};

// Continuous dependence on the data across two scenarios on the same network.
ContinuityEstimate network_continuity(const NetworkSolution& a,
                                      const NetworkSolution& b,
                                      const BlOptions& bl = {});

}  // namespace mtn

#endif  // MTN_NETWORK_SOLVER_HPP
