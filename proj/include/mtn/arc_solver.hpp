// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_ARC_SOLVER_HPP
#define MTN_ARC_SOLVER_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mtn/bl.hpp"
#include "mtn/flow.hpp"
#include "mtn/measure.hpp"

namespace mtn {

/// Initial/boundary data of the transport problem on one arc over the
/// space-time box [0,1] x [0,T]: initial space measure mu0 at t = 0 and
/// inflow time measure nu0 at x = 0.
struct ArcProblem {
  ArcClock clock;
  HybridMeasure mu0;  // on [0, 1]
  HybridMeasure nu0;  // on [0, T]
  double horizon = 0.0;
};

struct TraceOptions {
  // A resampled density piece is accepted once the midpoint-density mass
  // differs from the exact change-of-variables mass by at most mass_tol (or
  // matches to machine precision), and its width is at most width_frac of
  // the output domain.
  double mass_tol = 1e-8;
  double width_frac = 1.0 / 2048.0;
};

/// C^1 test function on the closed space-time box, with analytic partials.
struct SpaceTimeTestFunction {
  std::function<double(double, double)> value;  // (x, t)
  std::function<double(double, double)> dt;
  std::function<double(double, double)> dx;
  std::string name;
};

// x^a t^b monomials for a, b <= max_degree (the default family used by the
// weak-form residual checks).
std::vector<SpaceTimeTestFunction> polynomial_family(int max_degree = 3);

/// Solution of the single-arc problem. Holds the inputs (they are sufficient
/// statistics); every trace query is recomputed from them, so repeated
/// queries are bit-identical and there is no discretization drift.
class ArcSolution {
 public:
  explicit ArcSolution(ArcProblem problem);

  const ArcProblem& problem() const { return p_; }
  const ArcClock& clock() const { return p_.clock; }
  double horizon() const { return p_.horizon; }

  // Space trace mu_t on [0, 1]. Atoms map exactly; densities are pushed
  // forward by the exact change of variables and resampled onto a
  // piecewise-constant grid with exact per-piece mass.
  HybridMeasure trace_space(double t, const TraceOptions& opts = {}) const;

  // Outflow trace nu_1 on [0, T] through x = 1.
  HybridMeasure outflow(const TraceOptions& opts = {}) const;

  // Exact pairing <mu_t, psi> evaluated through the representation formula
  // (no resampling); quadrature tolerance `tol` applies to density parts.
  double pair_space_trace(double t, const std::function<double(double)>& psi,
                          double tol = 1e-11) const;

  // Exact pairings <mu_T, phi(.,T)> and <nu_1, phi(1,.)>.
  double pair_terminal(const std::function<double(double)>& phi,
                       double tol = 1e-11) const;
  double pair_outflow(const std::function<double(double)>& phi,
                      double tol = 1e-11) const;

  // <mu|_Q, dt phi + v dx phi>: time quadrature of the space-trace pairing
  // over panels split at every atom entry/exit and density image boundary.
  double weak_lhs(const SpaceTimeTestFunction& phi, double tol = 1e-10) const;

  // Times at which t -> <mu_t, psi(.,t)> may lose smoothness.
  std::vector<double> event_times() const;

 private:
  ArcProblem p_;
};

// max over the family of |<mu|_Q, dt phi + v dx phi> - (<mu_T - mu_0, phi> +
// <nu_1 - nu_0, phi>)|.
double check_balance(const ArcSolution& sol,
                     const std::vector<SpaceTimeTestFunction>& phis);

// Continuous-dependence ingredients: lhs = ||mu_T^a - mu_T^b|| +
// ||nu_1^a - nu_1^b||, rhs = same on the input data. The caller asserts
// lhs <= C * rhs.
std::pair<double, double> estimate_continuity(const ArcSolution& a,
                                              const ArcSolution& b,
                                              const BlOptions& bl = {});

struct TimeRegularity {
  double lhs = 0.0;             // ||mu_t - mu_t'|| + ||nu_1|[0,t] - nu_1|[0,t']||
  double gap = 0.0;             // t - t'
  double nu0_mass_between = 0.0;  // nu_0([t', t])
};

TimeRegularity estimate_time_regularity(const ArcSolution& sol, double t_hi,
                                        double t_lo, const BlOptions& bl = {});

}  // namespace mtn

#endif  // MTN_ARC_SOLVER_HPP
