// SPDX-License-Identifier: Apache-2.0
#include "mtn/arc_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtn/detail/density_builder.hpp"
#include "mtn/detail/quadrature.hpp"

namespace mtn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Shape acceptance for a resampled density piece: exact at machine precision,
// or within mass_tol with the width cap satisfied.
bool piece_ok(double mid_density, double width, double exact_mass,
              double mass_tol, double max_width) {
  const double approx = mid_density * width;
  const double err = std::abs(approx - exact_mass);
  if (err <= 64.0 * std::numeric_limits<double>::epsilon() *
                  std::max(1.0, std::abs(exact_mass))) {
    return true;
  }
  return err <= mass_tol && width <= max_width;
}

// Recursive mass-preserving resampler. `pre` maps an output point to its
// input preimage (used for exact masses), `rho` is the pushforward density.
// Pieces are emitted left to right as (lo, hi, value = exact mass / width).
void resample(double y1, double y2, double x1, double x2, double f_value,
              const std::function<double(double)>& pre,
              const std::function<double(double)>& rho, double mass_tol,
              double max_width, int depth, bool preimage_increasing,
              std::vector<std::array<double, 3>>& out) {
  const double width = y2 - y1;
  if (!(width > 0.0)) return;
  const double exact =
      f_value * (preimage_increasing ? (x2 - x1) : (x1 - x2));
  if (exact <= 0.0) return;
  const double mid = 0.5 * (y1 + y2);
  if (depth <= 0 || piece_ok(rho(mid), width, exact, mass_tol, max_width)) {
    out.push_back({y1, y2, exact / width});
    return;
  }
  const double xm = pre(mid);
  resample(y1, mid, x1, xm, f_value, pre, rho, mass_tol, max_width, depth - 1,
           preimage_increasing, out);
  resample(mid, y2, xm, x2, f_value, pre, rho, mass_tol, max_width, depth - 1,
           preimage_increasing, out);
}

}  // namespace

std::vector<SpaceTimeTestFunction> polynomial_family(int max_degree) {
  std::vector<SpaceTimeTestFunction> fam;
  for (int a = 0; a <= max_degree; ++a) {
    for (int b = 0; b <= max_degree; ++b) {
      SpaceTimeTestFunction f;
      f.name = "x^" + std::to_string(a) + " t^" + std::to_string(b);
      f.value = [a, b](double x, double t) {
        return std::pow(x, a) * std::pow(t, b);
      };
      f.dx = [a, b](double x, double t) {
        return a == 0 ? 0.0 : a * std::pow(x, a - 1) * std::pow(t, b);
      };
      f.dt = [a, b](double x, double t) {
        return b == 0 ? 0.0 : b * std::pow(x, a) * std::pow(t, b - 1);
      };
      fam.push_back(std::move(f));
    }
  }
  return fam;
}

ArcSolution::ArcSolution(ArcProblem problem) : p_(std::move(problem)) {
  require(p_.horizon > 0.0, "arc problem horizon must be > 0");
  require(p_.mu0.domain() == Interval{0.0, 1.0},
          "mu0 must live on the unit arc [0, 1]");
  require(p_.nu0.domain() == Interval{0.0, p_.horizon},
          "nu0 must live on the time interval [0, T]");
}

HybridMeasure ArcSolution::trace_space(double t, const TraceOptions& opts) const {
  if (!(t >= 0.0 && t <= p_.horizon)) {
    throw std::domain_error("trace_space: t outside [0, T]");
  }
  const ArcClock& ck = p_.clock;
  const double total = ck.total();

  std::vector<Atom> atoms;
  // Initial atoms that have not yet exited: x <= tau^{-1}(t), evaluated as
  // t <= tau(x) so that equality lands exactly on the boundary point 1.
  for (const Atom& a : p_.mu0.atoms()) {
    const FlowResult r = flow_from_interior(ck, a.position, t);
    if (!r.exited) atoms.push_back({r.position, a.mass});
  }
  // Boundary atoms already inside: sigma^{-1}(t) <= s <= t (both closed).
  for (const Atom& a : p_.nu0.atoms()) {
    if (a.position > t) continue;
    const FlowResult r = flow_from_boundary(ck, a.position, t);
    if (!r.exited) atoms.push_back({r.position, a.mass});
  }

  std::vector<std::array<double, 3>> pieces;
  const int max_depth = 40;
  const double max_width = opts.width_frac;  // output domain [0,1]

  // Density carried from mu0: supported on y >= Phi_t(0, 0).
  {
    const auto& bp = p_.mu0.density_breakpoints();
    const auto& val = p_.mu0.density_values();
    const double x_keep = total >= t ? ck.theta_inv(total - t) : -1.0;
    auto pre = [&](double y) { return ck.theta_inv(ck.theta(y) - t); };
    for (size_t i = 0; i < val.size(); ++i) {
      if (val[i] == 0.0) continue;
      const double x1 = bp[i];
      const double x2 = std::min(bp[i + 1], x_keep);
      if (!(x2 > x1)) continue;
      const double y1 = ck.theta_inv(ck.theta(x1) + t);
      const double y2 = x2 == x_keep ? 1.0 : ck.theta_inv(ck.theta(x2) + t);
      const double f = val[i];
      auto rho = [&, f](double y) {
        const double x = pre(y);
        return f * ck.velocity()(x) / ck.velocity()(y);
      };
      resample(y1, y2, x1, x2, f, pre, rho, opts.mass_tol, max_width, max_depth,
               true, pieces);
    }
  }
  // Density carried from nu0: supported on y <= Phi_t(0, 0); entry times run
  // backwards along the arc (later entries sit closer to x = 0).
  {
    const auto& bp = p_.nu0.density_breakpoints();
    const auto& val = p_.nu0.density_values();
    const double s_min = std::max(0.0, ck.sigma_inv(t));
    std::vector<std::array<double, 3>> rev;
    auto pre = [&](double y) { return t - ck.theta(y); };
    for (size_t i = val.size(); i-- > 0;) {
      if (val[i] == 0.0) continue;
      const double s1 = std::max(bp[i], s_min);
      const double s2 = std::min(bp[i + 1], t);
      if (!(s2 > s1)) continue;
      // y decreasing in s: the piece [s1, s2] maps to [y(s2), y(s1)].
      const double y1 = ck.theta_inv(t - s2);
      const double y2 = ck.theta_inv(t - s1);
      const double r = val[i];
      auto rho = [&, r](double y) { return r / ck.velocity()(y); };
      resample(y1, y2, s2, s1, r, pre, rho, opts.mass_tol, max_width, max_depth,
               false, rev);
    }
    // `rev` was produced from the last time piece outwards, which is already
    // left-to-right in space; the loop order above guarantees that.
    pieces.insert(pieces.begin(), rev.begin(), rev.end());
  }

  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  detail::DensityBuilder db;
  for (const auto& p : pieces) db.push(p[0], p[1], p[2]);
  return HybridMeasure({0.0, 1.0}, std::move(atoms), std::move(db.breakpoints()),
                       std::move(db.values()));
}

HybridMeasure ArcSolution::outflow(const TraceOptions& opts) const {
  const ArcClock& ck = p_.clock;
  const double total = ck.total();
  const double T = p_.horizon;

  std::vector<Atom> atoms;
  // Initial atoms that exit strictly before the horizon cut: x > tau^{-1}(T),
  // evaluated as tau(x) < T so equality stays in mu_T (complementary to the
  // trace predicate on the same computed tau).
  for (const Atom& a : p_.mu0.atoms()) {
    const double tau = ck.tau(a.position);
    if (tau < T) atoms.push_back({tau, a.mass});
  }
  // Boundary atoms that exit: s < sigma^{-1}(T), i.e. sigma(s) < T strictly.
  for (const Atom& a : p_.nu0.atoms()) {
    const double sigma = ck.sigma(a.position);
    if (sigma < T) atoms.push_back({sigma, a.mass});
  }

  std::vector<std::array<double, 3>> pieces;
  const int max_depth = 40;
  const double max_width = opts.width_frac * T;

  // Density from mu0 exits at times tau(x); g(t) = f(tau^{-1}(t)) v(tau^{-1}(t)).
  {
    const auto& bp = p_.mu0.density_breakpoints();
    const auto& val = p_.mu0.density_values();
    const double x_cut = T >= total ? -1.0 : ck.theta_inv(total - T);
    std::vector<std::array<double, 3>> rev;
    auto pre = [&](double t) { return ck.theta_inv(total - t); };
    for (size_t i = val.size(); i-- > 0;) {
      if (val[i] == 0.0) continue;
      const double x1 = std::max(bp[i], x_cut);
      const double x2 = bp[i + 1];
      if (!(x2 > x1)) continue;
      // Times decrease with x: [x1, x2] exits over [tau(x2), tau(x1)].
      const double t1 = std::max(0.0, total - ck.theta(x2));
      const double t2 = x1 == x_cut ? T : std::min(T, total - ck.theta(x1));
      const double f = val[i];
      auto g = [&, f](double t) {
        const double x = pre(t);
        return f * ck.velocity()(x);
      };
      resample(t1, t2, x2, x1, f, pre, g, opts.mass_tol, max_width, max_depth,
               false, rev);
    }
    pieces.insert(pieces.end(), rev.begin(), rev.end());
  }
  // Density from nu0 exits as a rigid shift by tau(0): exact, no resampling.
  {
    const auto& bp = p_.nu0.density_breakpoints();
    const auto& val = p_.nu0.density_values();
    const double s_cut = std::min(ck.sigma_inv(T), T);
    for (size_t i = 0; i < val.size(); ++i) {
      if (val[i] == 0.0) continue;
      const double s1 = bp[i];
      const double s2 = std::min(bp[i + 1], s_cut);
      if (!(s2 > s1)) continue;
      pieces.push_back({s1 + total, std::min(s2 + total, T), val[i]});
    }
  }

  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  detail::DensityBuilder db;
  for (const auto& p : pieces) db.push(p[0], p[1], p[2]);
  return HybridMeasure({0.0, T}, std::move(atoms), std::move(db.breakpoints()),
                       std::move(db.values()));
}

double ArcSolution::pair_space_trace(double t,
                                     const std::function<double(double)>& psi,
                                     double tol) const {
  if (!(t >= 0.0 && t <= p_.horizon)) {
    throw std::domain_error("pair_space_trace: t outside [0, T]");
  }
  const ArcClock& ck = p_.clock;
  const double total = ck.total();
  double s = 0.0;
  for (const Atom& a : p_.mu0.atoms()) {
    const FlowResult r = flow_from_interior(ck, a.position, t);
    if (!r.exited) s += a.mass * psi(r.position);
  }
  for (const Atom& a : p_.nu0.atoms()) {
    if (a.position > t) continue;
    const FlowResult r = flow_from_boundary(ck, a.position, t);
    if (!r.exited) s += a.mass * psi(r.position);
  }
  {
    const auto& bp = p_.mu0.density_breakpoints();
    const auto& val = p_.mu0.density_values();
    const double x_keep = total >= t ? ck.theta_inv(total - t) : -1.0;
    for (size_t i = 0; i < val.size(); ++i) {
      if (val[i] == 0.0) continue;
      const double x1 = bp[i];
      const double x2 = std::min(bp[i + 1], x_keep);
      if (!(x2 > x1)) continue;
      auto f = [&](double x) {
        return psi(std::min(1.0, ck.theta_inv(ck.theta(x) + t)));
      };
      s += val[i] * detail::adaptive_simpson(f, x1, x2, tol);
    }
  }
  {
    const auto& bp = p_.nu0.density_breakpoints();
    const auto& val = p_.nu0.density_values();
    const double s_min = std::max(0.0, ck.sigma_inv(t));
    for (size_t i = 0; i < val.size(); ++i) {
      if (val[i] == 0.0) continue;
      const double s1 = std::max(bp[i], s_min);
      const double s2 = std::min(bp[i + 1], t);
      if (!(s2 > s1)) continue;
      auto f = [&](double u) { return psi(std::min(1.0, ck.theta_inv(t - u))); };
      s += val[i] * detail::adaptive_simpson(f, s1, s2, tol);
    }
  }
  return s;
}

double ArcSolution::pair_terminal(const std::function<double(double)>& phi,
                                  double tol) const {
  return pair_space_trace(p_.horizon, phi, tol);
}

double ArcSolution::pair_outflow(const std::function<double(double)>& phi,
                                 double tol) const {
  const ArcClock& ck = p_.clock;
  const double total = ck.total();
  const double T = p_.horizon;
  double s = 0.0;
  for (const Atom& a : p_.mu0.atoms()) {
    const double tau = ck.tau(a.position);
    if (tau < T) s += a.mass * phi(tau);
  }
  for (const Atom& a : p_.nu0.atoms()) {
    const double sigma = ck.sigma(a.position);
    if (sigma < T) s += a.mass * phi(sigma);
  }
  {
    const auto& bp = p_.mu0.density_breakpoints();
    const auto& val = p_.mu0.density_values();
    const double x_cut = T >= total ? -1.0 : ck.theta_inv(total - T);
    for (size_t i = 0; i < val.size(); ++i) {
      if (val[i] == 0.0) continue;
      const double x1 = std::max(bp[i], x_cut);
      const double x2 = bp[i + 1];
      if (!(x2 > x1)) continue;
      auto f = [&](double x) { return phi(total - ck.theta(x)); };
      s += val[i] * detail::adaptive_simpson(f, x1, x2, tol);
    }
  }
  {
    const auto& bp = p_.nu0.density_breakpoints();
    const auto& val = p_.nu0.density_values();
    const double s_cut = std::min(ck.sigma_inv(T), T);
    for (size_t i = 0; i < val.size(); ++i) {
      if (val[i] == 0.0) continue;
      const double s1 = bp[i];
      const double s2 = std::min(bp[i + 1], s_cut);
      if (!(s2 > s1)) continue;
      auto f = [&](double u) { return phi(u + total); };
      s += val[i] * detail::adaptive_simpson(f, s1, s2, tol);
    }
  }
  return s;
}

std::vector<double> ArcSolution::event_times() const {
  const ArcClock& ck = p_.clock;
  const double T = p_.horizon;
  std::vector<double> ts{0.0, T};
  auto push = [&](double t) {
    if (t > 0.0 && t < T) ts.push_back(t);
  };
  push(ck.total());
  for (const Atom& a : p_.mu0.atoms()) push(ck.tau(a.position));
  for (double x : p_.mu0.density_breakpoints()) push(ck.tau(x));
  for (const Atom& a : p_.nu0.atoms()) {
    push(a.position);
    push(ck.sigma(a.position));
  }
  for (double s : p_.nu0.density_breakpoints()) {
    push(s);
    push(ck.sigma(s));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-15; }),
           ts.end());
  return ts;
}

double ArcSolution::weak_lhs(const SpaceTimeTestFunction& phi, double tol) const {
  const ArcClock& ck = p_.clock;
  auto integrand = [&](double t) {
    auto psi = [&](double y) {
      return phi.dt(y, t) + ck.velocity()(y) * phi.dx(y, t);
    };
    return pair_space_trace(t, psi);
  };
  const std::vector<double> panels = event_times();
  double s = 0.0;
  for (size_t i = 0; i + 1 < panels.size(); ++i) {
    const double share =
        (panels[i + 1] - panels[i]) / (panels.back() - panels.front());
    s += detail::adaptive_gauss(integrand, panels[i], panels[i + 1],
                                std::max(1e-14, tol * share));
  }
  return s;
}

double check_balance(const ArcSolution& sol,
                     const std::vector<SpaceTimeTestFunction>& phis) {
  const double T = sol.horizon();
  double worst = 0.0;
  for (const auto& phi : phis) {
    if (!phi.value || !phi.dt || !phi.dx) {
      throw std::invalid_argument(
          "check_balance: test function must provide value, dt and dx");
    }
    const double lhs = sol.weak_lhs(phi);
    const double mu_T = sol.pair_terminal([&](double x) { return phi.value(x, T); });
    const double mu_0 =
        pair(sol.problem().mu0, [&](double x) { return phi.value(x, 0.0); });
    const double nu_1 = sol.pair_outflow([&](double t) { return phi.value(1.0, t); });
    const double nu_0 =
        pair(sol.problem().nu0, [&](double t) { return phi.value(0.0, t); });
    const double rhs = (mu_T - mu_0) + (nu_1 - nu_0);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

std::pair<double, double> estimate_continuity(const ArcSolution& a,
                                              const ArcSolution& b,
                                              const BlOptions& bl) {
  if (a.clock().total() != b.clock().total() || a.horizon() != b.horizon()) {
    throw std::invalid_argument(
        "estimate_continuity: problems must share the clock and horizon");
  }
  const double lhs = bl_distance(a.trace_space(a.horizon()),
                                 b.trace_space(b.horizon()), bl) +
                     bl_distance(a.outflow(), b.outflow(), bl);
  const double rhs = bl_distance(a.problem().mu0, b.problem().mu0, bl) +
                     bl_distance(a.problem().nu0, b.problem().nu0, bl);
  return {lhs, rhs};
}

TimeRegularity estimate_time_regularity(const ArcSolution& sol, double t_hi,
                                        double t_lo, const BlOptions& bl) {
  if (!(t_lo < t_hi)) {
    throw std::invalid_argument("estimate_time_regularity: requires t' < t");
  }
  const HybridMeasure nu1 = sol.outflow();
  TimeRegularity r;
  r.gap = t_hi - t_lo;
  r.nu0_mass_between =
      restrict_to(sol.problem().nu0, {t_lo, t_hi}).total_mass();
  r.lhs = bl_distance(sol.trace_space(t_hi), sol.trace_space(t_lo), bl) +
          bl_distance(restrict_to(nu1, {0.0, t_hi}),
                      restrict_to(nu1, {0.0, t_lo}), bl);
  return r;
}

}  // namespace mtn
