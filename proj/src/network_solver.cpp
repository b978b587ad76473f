// SPDX-License-Identifier: Apache-2.0
#include "mtn/network_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "mtn/errors.hpp"

namespace mtn {

namespace {

const HybridMeasure& zero_unit() {
  static const HybridMeasure z = HybridMeasure::zero({0.0, 1.0});
  return z;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MTN_MAX_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n) on up to `workers` threads with a static
// partition, so results are written to caller-owned slots deterministically.
void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::min(workers, n);
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// nu_0^j assembled from the outflows of the arcs incident to j's tail (or
// from the source inflow), weighted by the schedule entries.
HybridMeasure assemble_inflow(const Scenario& sc, int arc_idx,
                              const std::vector<HybridMeasure>& arc_outflows) {
  const Network& net = sc.network;
  const NetworkArc& a = net.arc(arc_idx);
  const Interval time_dom{0.0, net.horizon()};
  HybridMeasure nu0 = HybridMeasure::zero(time_dom);
  if (net.role(a.tail) == VertexRole::source) {
    const HybridMeasure& inflow = sc.inflow_for(a.tail);
    if (!inflow.is_zero()) {
      nu0 = weight_by(inflow, net.routing_weight(a.tail, -1, arc_idx));
    }
  } else {
    for (int k : net.incoming(a.tail)) {
      const HybridMeasure& up = arc_outflows[static_cast<size_t>(k)];
      if (up.is_zero()) continue;
      nu0 = add(nu0, weight_by(up, net.routing_weight(a.tail, k, arc_idx)));
    }
  }
  return nu0;
}

double min_traversal_time(const Network& net) {
  double m = std::numeric_limits<double>::infinity();
  for (const NetworkArc& a : net.arcs()) m = std::min(m, ArcClock(a.velocity).total());
  return m;
}

}  // namespace

NetworkSolution NetworkSolution::materialize(std::shared_ptr<const Scenario> sc,
                                             Algorithm algorithm,
                                             std::vector<HybridMeasure> inflows,
                                             const SolveOptions& opts) {
  const Network& net = sc->network;
  const int n = static_cast<int>(net.arcs().size());
  NetworkSolution out;
  out.scenario_ = std::move(sc);
  out.algorithm_ = algorithm;
  out.arcs_.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    out.arcs_.emplace_back(ArcProblem{ArcClock(net.arc(j).velocity),
                                      out.scenario_->initial_for(net.arc(j).id),
                                      std::move(inflows[static_cast<size_t>(j)]),
                                      net.horizon()});
  }
  out.outflows_.resize(static_cast<size_t>(n), HybridMeasure::zero({0.0, net.horizon()}));
  out.terminals_.resize(static_cast<size_t>(n), zero_unit());
  parallel_for(n, resolve_workers(opts.max_workers), [&](int j) {
    out.outflows_[static_cast<size_t>(j)] = out.arcs_[static_cast<size_t>(j)].outflow(opts.trace);
    out.terminals_[static_cast<size_t>(j)] =
        out.arcs_[static_cast<size_t>(j)].trace_space(net.horizon(), opts.trace);
  });

  for (const auto& v : net.vertex_ids()) {
    if (net.role(v) != VertexRole::well) continue;
    HybridMeasure omega = HybridMeasure::zero({0.0, net.horizon()});
    for (int k : net.incoming(v)) omega = add(omega, out.outflows_[static_cast<size_t>(k)]);
    out.wells_.emplace(v, std::move(omega));
  }

  NetworkSolution::Ledger led;
  for (int j = 0; j < n; ++j) {
    led.initial_mass += out.scenario_->initial_for(net.arc(j).id).total_mass();
    led.terminal_mass += out.terminals_[static_cast<size_t>(j)].total_mass();
  }
  for (const auto& v : net.vertex_ids()) {
    if (net.role(v) == VertexRole::source) {
      led.inflow_mass += out.scenario_->inflow_for(v).total_mass();
    }
  }
  for (const auto& [v, omega] : out.wells_) led.well_outflow_mass += omega.total_mass();
  out.ledger_ = led;
  return out;
}

const HybridMeasure& Scenario::initial_for(const std::string& arc_id) const {
  auto it = initial.find(arc_id);
  return it == initial.end() ? zero_unit() : it->second;
}

HybridMeasure Scenario::inflow_for(const std::string& vertex_id) const {
  auto it = inflows.find(vertex_id);
  if (it != inflows.end()) return it->second;
  return HybridMeasure::zero({0.0, network.horizon()});
}

void Scenario::validate() const {
  const Interval unit{0.0, 1.0};
  const Interval time_dom{0.0, network.horizon()};
  for (const auto& [arc_id, mu] : initial) {
    if (network.arc_index(arc_id) < 0) {
      throw std::invalid_argument("initial measure on unknown arc '" + arc_id + "'");
    }
    if (!(mu.domain() == unit)) {
      throw std::invalid_argument("initial measure on arc '" + arc_id +
                                  "' must live on [0, 1]");
    }
  }
  for (const auto& [v, s] : inflows) {
    if (network.role(v) != VertexRole::source) {
      throw std::invalid_argument("inflow prescribed at non-source vertex '" + v + "'");
    }
    if (!(s.domain() == time_dom)) {
      throw std::invalid_argument("inflow at '" + v + "' must live on [0, T]");
    }
  }
}

const ArcSolution& NetworkSolution::arc(const std::string& arc_id) const {
  const int j = scenario_->network.arc_index(arc_id);
  if (j < 0) throw std::invalid_argument("unknown arc '" + arc_id + "'");
  return arcs_[static_cast<size_t>(j)];
}

const HybridMeasure& NetworkSolution::inflow(const std::string& arc_id) const {
  return arc(arc_id).problem().nu0;
}

const HybridMeasure& NetworkSolution::outflow(const std::string& arc_id) const {
  const int j = scenario_->network.arc_index(arc_id);
  if (j < 0) throw std::invalid_argument("unknown arc '" + arc_id + "'");
  return outflows_[static_cast<size_t>(j)];
}

const HybridMeasure& NetworkSolution::terminal(const std::string& arc_id) const {
  const int j = scenario_->network.arc_index(arc_id);
  if (j < 0) throw std::invalid_argument("unknown arc '" + arc_id + "'");
  return terminals_[static_cast<size_t>(j)];
}

NetworkSolution solve_levelwise(const Scenario& sc, const SolveOptions& opts) {
  sc.validate();
  const Network& net = sc.network;
  const LevelPartition part = source_distance_partition(net);
  if (!part.flagged.empty()) {
    // Flagged arcs are tolerable only when provably empty: zero initial data
    // and no mass routed in from the level-covered part.
    std::set<int> flagged(part.flagged.begin(), part.flagged.end());
    for (int j : part.flagged) {
      const NetworkArc& a = net.arc(j);
      if (!sc.initial_for(a.id).is_zero()) {
        throw UnsupportedScenario(
            "arc '" + a.id +
            "' lies on or behind a directed cycle and carries initial mass; "
            "use the time-stepping algorithm");
      }
      for (int k : net.incoming(a.tail)) {
        if (flagged.count(k) == 0) {
          throw UnsupportedScenario(
              "arc '" + a.id +
              "' lies on a directed cycle reachable from the sources; use the "
              "time-stepping algorithm");
        }
      }
    }
  }

  const int n = static_cast<int>(net.arcs().size());
  const Interval time_dom{0.0, net.horizon()};
  std::vector<HybridMeasure> nu0(static_cast<size_t>(n), HybridMeasure::zero(time_dom));
  std::vector<HybridMeasure> nu1(static_cast<size_t>(n), HybridMeasure::zero(time_dom));
  const int workers = resolve_workers(opts.max_workers);
  for (const auto& lvl : part.levels) {
    // Inflows of this level depend only on earlier levels.
    for (int j : lvl) nu0[static_cast<size_t>(j)] = assemble_inflow(sc, j, nu1);
    parallel_for(static_cast<int>(lvl.size()), workers, [&](int q) {
      const int j = lvl[static_cast<size_t>(q)];
      ArcSolution sol(ArcProblem{ArcClock(net.arc(j).velocity),
                                 sc.initial_for(net.arc(j).id),
                                 nu0[static_cast<size_t>(j)], net.horizon()});
      nu1[static_cast<size_t>(j)] = sol.outflow(opts.trace);
    });
  }
  return NetworkSolution::materialize(std::make_shared<Scenario>(sc), Algorithm::levelwise,
                     std::move(nu0), opts);
}

NetworkSolution solve_timestepped(const Scenario& sc, const SolveOptions& opts) {
  sc.validate();
  const Network& net = sc.network;
  const double min_tau = min_traversal_time(net);
  double dt = 0.9 * min_tau;
  if (opts.time_step.has_value()) {
    dt = *opts.time_step;
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be > 0");
    if (!(dt < min_tau)) {
      throw std::invalid_argument(
          "time step must be strictly below the minimum arc traversal time " +
          std::to_string(min_tau));
    }
  }
  const double T = net.horizon();
  const int n = static_cast<int>(net.arcs().size());
  const Interval time_dom{0.0, T};
  const int workers = resolve_workers(opts.max_workers);

  // Source inflows are data: route them into nu_0 up front. The windows only
  // sequence the internal coupling, always one full-horizon problem per arc.
  std::vector<HybridMeasure> nu0(static_cast<size_t>(n), HybridMeasure::zero(time_dom));
  for (int j = 0; j < n; ++j) {
    const NetworkArc& a = net.arc(j);
    if (net.role(a.tail) == VertexRole::source) {
      const HybridMeasure& inflow = sc.inflow_for(a.tail);
      if (!inflow.is_zero()) {
        nu0[static_cast<size_t>(j)] =
            weight_by(inflow, net.routing_weight(a.tail, -1, j));
      }
    }
  }

  std::vector<HybridMeasure> window_out(static_cast<size_t>(n),
                                        HybridMeasure::zero(time_dom));
  double t_lo = 0.0;
  bool first = true;
  while (t_lo < T) {
    const double t_hi = std::min(t_lo + dt, T);
    // Outflow inside ((t_lo, t_hi] depends only on nu_0 entries before t_lo
    // (nothing traverses an arc within one window), so it is determined.
    parallel_for(n, workers, [&](int j) {
      ArcSolution sol(ArcProblem{ArcClock(net.arc(j).velocity),
                                 sc.initial_for(net.arc(j).id),
                                 nu0[static_cast<size_t>(j)], T});
      window_out[static_cast<size_t>(j)] =
          restrict_to(sol.outflow(opts.trace), {t_lo, t_hi},
                      first ? Endpoint::closed : Endpoint::open, Endpoint::closed);
    });
    for (int j = 0; j < n; ++j) {
      const NetworkArc& a = net.arc(j);
      if (net.role(a.tail) != VertexRole::internal) continue;
      for (int k : net.incoming(a.tail)) {
        const HybridMeasure& up = window_out[static_cast<size_t>(k)];
        if (up.is_zero()) continue;
        nu0[static_cast<size_t>(j)] =
            add(nu0[static_cast<size_t>(j)],
                weight_by(up, net.routing_weight(a.tail, k, j)));
      }
    }
    t_lo = t_hi;
    first = false;
  }
  return NetworkSolution::materialize(std::make_shared<Scenario>(sc), Algorithm::timestepped,
                     std::move(nu0), opts);
}

NetworkSolution solve(const Scenario& sc, const SolveOptions& opts) {
  switch (opts.algorithm) {
    case Algorithm::levelwise:
      return solve_levelwise(sc, opts);
    case Algorithm::timestepped:
      return solve_timestepped(sc, opts);
    case Algorithm::automatic:
      break;
  }
  try {
    return solve_levelwise(sc, opts);
  } catch (const UnsupportedScenario&) {
    return solve_timestepped(sc, opts);
  }
}

std::vector<NetworkTestFunction> network_polynomial_family(const Network& net,
                                                           int max_degree) {
  std::vector<NetworkTestFunction> fam;
  std::map<std::string, double> potential;
  {
    int k = 0;
    for (const auto& v : net.vertex_ids()) {
      potential[v] = 0.3 + 0.17 * static_cast<double>(++k);
    }
  }
  auto time_poly = [](int b) {
    return [b](double t) { return std::pow(t, b); };
  };
  auto time_poly_d = [](int b) {
    return [b](double t) { return b == 0 ? 0.0 : b * std::pow(t, b - 1); };
  };
  for (int b = 0; b <= max_degree; ++b) {
    // Space-constant time polynomial: trivially continuous on the network.
    {
      NetworkTestFunction f;
      f.name = "t^" + std::to_string(b);
      for (const NetworkArc& a : net.arcs()) {
        SpaceTimeTestFunction g;
        auto q = time_poly(b);
        auto qd = time_poly_d(b);
        g.value = [q](double, double t) { return q(t); };
        g.dt = [qd](double, double t) { return qd(t); };
        g.dx = [](double, double) { return 0.0; };
        f.per_arc[a.id] = std::move(g);
      }
      fam.push_back(std::move(f));
    }
    // Vertex-potential interpolant times a time polynomial: continuous since
    // arc endpoint values equal the shared vertex potentials.
    {
      NetworkTestFunction f;
      f.name = "potential * t^" + std::to_string(b);
      for (const NetworkArc& a : net.arcs()) {
        const double pa = potential[a.tail];
        const double pb = potential[a.head];
        SpaceTimeTestFunction g;
        auto q = time_poly(b);
        auto qd = time_poly_d(b);
        g.value = [pa, pb, q](double x, double t) {
          return (pa * (1.0 - x) + pb * x) * q(t);
        };
        g.dt = [pa, pb, qd](double x, double t) {
          return (pa * (1.0 - x) + pb * x) * qd(t);
        };
        g.dx = [pa, pb, q](double, double t) { return (pb - pa) * q(t); };
        f.per_arc[a.id] = std::move(g);
      }
      fam.push_back(std::move(f));
    }
    // Per-arc bubble vanishing at both endpoints, cubic in x.
    {
      NetworkTestFunction f;
      f.name = "bubble * t^" + std::to_string(b);
      int idx = 0;
      for (const NetworkArc& a : net.arcs()) {
        const double c = 1.0 + 0.25 * static_cast<double>(idx++);
        SpaceTimeTestFunction g;
        auto q = time_poly(b);
        auto qd = time_poly_d(b);
        g.value = [c, q](double x, double t) {
          return c * x * (1.0 - x) * (1.0 + x) * q(t);
        };
        g.dt = [c, qd](double x, double t) {
          return c * x * (1.0 - x) * (1.0 + x) * qd(t);
        };
        g.dx = [c, q](double x, double t) {
          return c * (1.0 - 3.0 * x * x) * q(t);
        };
        f.per_arc[a.id] = std::move(g);
      }
      fam.push_back(std::move(f));
    }
  }
  return fam;
}

namespace {

// Vertex continuity of a network test function, sampled on a small time grid.
void validate_continuity(const Network& net, const NetworkTestFunction& f) {
  for (const NetworkArc& a : net.arcs()) {
    if (f.per_arc.count(a.id) == 0) {
      throw std::invalid_argument("network test function '" + f.name +
                                  "' missing arc '" + a.id + "'");
    }
  }
  const double T = net.horizon();
  for (const auto& v : net.vertex_ids()) {
    for (int step = 0; step <= 4; ++step) {
      const double t = T * step / 4.0;
      double ref = 0.0;
      bool have = false;
      auto check = [&](double val) {
        if (!have) {
          ref = val;
          have = true;
        } else if (std::abs(val - ref) > 1e-9) {
          throw std::invalid_argument("network test function '" + f.name +
                                      "' is discontinuous at vertex '" + v + "'");
        }
      };
      for (int j : net.outgoing(v)) check(f.per_arc.at(net.arc(j).id).value(0.0, t));
      for (int j : net.incoming(v)) check(f.per_arc.at(net.arc(j).id).value(1.0, t));
    }
  }
}

}  // namespace

double global_balance(const NetworkSolution& sol,
                      const std::vector<NetworkTestFunction>& phis) {
  const Scenario& sc = sol.scenario();
  const Network& net = sc.network;
  const double T = net.horizon();
  double worst = 0.0;
  for (const NetworkTestFunction& f : phis) {
    validate_continuity(net, f);
    double lhs = 0.0;
    double rhs = 0.0;
    for (const NetworkArc& a : net.arcs()) {
      const SpaceTimeTestFunction& g = f.per_arc.at(a.id);
      const ArcSolution& arc_sol = sol.arc(a.id);
      lhs += arc_sol.weak_lhs(g);
      rhs += arc_sol.pair_terminal([&](double x) { return g.value(x, T); });
      rhs -= pair(sc.initial_for(a.id), [&](double x) { return g.value(x, 0.0); });
    }
    // omega - sigma; internal-vertex terms cancel through the junction
    // coupling, which is exactly what this residual verifies.
    for (const auto& v : net.vertex_ids()) {
      if (net.role(v) == VertexRole::well) {
        for (int j : net.incoming(v)) {
          const SpaceTimeTestFunction& g = f.per_arc.at(net.arc(j).id);
          rhs += sol.arc(net.arc(j).id).pair_outflow(
              [&](double t) { return g.value(1.0, t); });
        }
      } else if (net.role(v) == VertexRole::source) {
        const HybridMeasure& inflow = sc.inflow_for(v);
        if (inflow.is_zero() || net.outgoing(v).empty()) continue;
        const SpaceTimeTestFunction& g =
            f.per_arc.at(net.arc(net.outgoing(v).front()).id);
        rhs -= pair(inflow, [&](double t) { return g.value(0.0, t); });
      }
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

ContinuityEstimate network_continuity(const NetworkSolution& a,
                                      const NetworkSolution& b,
                                      const BlOptions& bl) {
  const Network& na = a.scenario().network;
  const Network& nb = b.scenario().network;
  if (na.horizon() != nb.horizon() || na.arcs().size() != nb.arcs().size()) {
    throw std::invalid_argument("network_continuity: scenarios differ structurally");
  }
  for (size_t j = 0; j < na.arcs().size(); ++j) {
    if (na.arcs()[j].id != nb.arcs()[j].id ||
        na.arcs()[j].tail != nb.arcs()[j].tail ||
        na.arcs()[j].head != nb.arcs()[j].head) {
      throw std::invalid_argument("network_continuity: scenarios differ structurally");
    }
  }
  ContinuityEstimate e;
  for (const NetworkArc& arc : na.arcs()) {
    e.lhs += bl_distance(a.terminal(arc.id), b.terminal(arc.id), bl);
    e.rhs += bl_distance(a.scenario().initial_for(arc.id),
                         b.scenario().initial_for(arc.id), bl);
  }
  for (const auto& [v, omega] : a.well_outflows()) {
    e.lhs += bl_distance(omega, b.well_outflows().at(v), bl);
  }
  for (const auto& v : na.vertex_ids()) {
    if (na.role(v) == VertexRole::source) {
      e.rhs += bl_distance(a.scenario().inflow_for(v), b.scenario().inflow_for(v), bl);
    }
  }
  return e;
}

}  // namespace mtn
