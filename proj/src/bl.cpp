// SPDX-License-Identifier: Apache-2.0
#include "mtn/bl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtn/detail/concave_pl.hpp"

namespace mtn {

namespace detail {

double bl_chain_value(const std::vector<double>& nodes,
                      const std::vector<double>& weights,
                      double lipschitz_budget) {
  const double L = lipschitz_budget;
  const double s = 1.0 - L;
  ConcavePL v(s);
  v.tilt(weights[0]);
  for (size_t i = 1; i < nodes.size(); ++i) {
    v.sup_conv(L * (nodes[i] - nodes[i - 1]));
    v.truncate(-s, s);
    v.tilt(weights[i]);
  }
  return v.max();
}

std::vector<double> bl_grid(const HybridMeasure& mu, const HybridMeasure& nu,
                            const BlOptions& opts) {
  const Interval d = mu.domain();
  std::vector<double> base{d.lo, d.hi};
  // Atom positions become grid nodes unless there are more atoms than grid
  // cells (e.g. huge empirical measures); then atoms are lumped onto the
  // surrounding nodes instead, which stays within the O(h * mass) grid error.
  const size_t atom_cap = static_cast<size_t>(std::max(64, opts.grid));
  const bool atoms_as_nodes = mu.atoms().size() + nu.atoms().size() <= atom_cap;
  auto take = [&](const HybridMeasure& m) {
    if (atoms_as_nodes) {
      for (const Atom& a : m.atoms()) base.push_back(a.position);
    }
    for (double x : m.density_breakpoints()) base.push_back(x);
  };
  take(mu);
  take(nu);
  for (double x : opts.extra_nodes) {
    if (d.contains(x)) base.push_back(x);
  }
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());

  const int grid = std::max(1, opts.grid);
  const double h = d.length() / grid;
  std::vector<double> nodes;
  nodes.reserve(base.size() + static_cast<size_t>(grid) + 8);
  for (size_t i = 0; i + 1 < base.size(); ++i) {
    nodes.push_back(base[i]);
    const double gap = base[i + 1] - base[i];
    size_t parts = 1;
    while (gap / static_cast<double>(parts) > h && parts < (size_t{1} << 30)) {
      parts *= 2;
    }
    for (size_t k = 1; k < parts; ++k) {
      nodes.push_back(base[i] + gap * (static_cast<double>(k) / parts));
    }
  }
  nodes.push_back(base.back());
  return nodes;
}

std::vector<double> bl_node_weights(const HybridMeasure& mu,
                                    const HybridMeasure& nu,
                                    const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size(), 0.0);
  auto lump_atoms = [&](const HybridMeasure& m, double sign) {
    for (const Atom& a : m.atoms()) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), a.position);
      size_t i = static_cast<size_t>(it - nodes.begin());
      if (i < nodes.size() && nodes[i] == a.position) {
        w[i] += sign * a.mass;
        continue;
      }
      // Off-node atom: split linearly between the surrounding nodes, which
      // pairs exactly against grid-piecewise-linear test functions.
      if (i == 0) {
        w[0] += sign * a.mass;
      } else if (i == nodes.size()) {
        w.back() += sign * a.mass;
      } else {
        const double lam =
            (a.position - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
        w[i - 1] += sign * a.mass * (1.0 - lam);
        w[i] += sign * a.mass * lam;
      }
    }
  };
  lump_atoms(mu, 1.0);
  lump_atoms(nu, -1.0);
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
    const double cell =
        (mu.density_at(mid) - nu.density_at(mid)) * (nodes[i + 1] - nodes[i]);
    w[i] += 0.5 * cell;
    w[i + 1] += 0.5 * cell;
  }
  return w;
}

// The optimum value as a function of the Lipschitz budget L (with the sup
// bound s = 1 - L) is concave, so a golden-section search finds the global
// maximum.
double bl_chain_max(const std::vector<double>& nodes,
                    const std::vector<double>& w) {
  auto g = [&](double L) { return bl_chain_value(nodes, w, L); };
  const double inv_phi = 0.6180339887498949;
  double a = 0.0, b = 1.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = g(x1);
  double f2 = g(x2);
  double best = std::max(std::max(f1, f2), g(0.0));
  for (int iter = 0; iter < 64; ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = g(x1);
    }
    best = std::max(best, std::max(f1, f2));
  }
  return best;
}

}  // namespace detail

double bl_distance(const HybridMeasure& mu, const HybridMeasure& nu,
                   const BlOptions& opts) {
  if (!(mu.domain() == nu.domain())) {
    throw std::invalid_argument("bl_distance: measures live on different domains");
  }
  if (mu.domain().length() == 0.0) {
    // Point domain: only constant test functions, |phi| <= 1.
    return std::abs(mu.total_mass() - nu.total_mass());
  }
  const std::vector<double> nodes = detail::bl_grid(mu, nu, opts);
  const std::vector<double> w = detail::bl_node_weights(mu, nu, nodes);
  bool all_zero = true;
  for (double x : w) {
    if (x != 0.0) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) return 0.0;
  return std::max(0.0, detail::bl_chain_max(nodes, w));
}

double bl_norm(const HybridMeasure& mu, const BlOptions& opts) {
  return bl_distance(mu, HybridMeasure::zero(mu.domain()), opts);
}

}  // namespace mtn
