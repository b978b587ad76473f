// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_BL_HPP
#define MTN_BL_HPP

#include <vector>

#include "mtn/measure.hpp"

namespace mtn {

struct BlOptions {
  // Target number of grid intervals across the domain; the merged grid of
  // atoms and density breakpoints is refined by power-of-two subdivision
  // until every cell is at most (hi-lo)/grid wide.
  int grid = 2048;
  // Additional grid nodes, e.g. to put several distance computations on a
  // common grid.
  std::vector<double> extra_nodes;
};

// Dual bounded-Lipschitz distance ||mu - nu||*_BL: the supremum of
// <mu - nu, phi> over test functions with ||phi||_inf + Lip(phi) <= 1,
// computed on the merged grid (piecewise-linear phi). The result is exact
// for the grid-restricted problem and within O(h * mass) of the true value.
double bl_distance(const HybridMeasure& mu, const HybridMeasure& nu,
                   const BlOptions& opts = {});

// ||mu||*_BL = bl_distance(mu, 0); equals total mass for positive measures.
double bl_norm(const HybridMeasure& mu, const BlOptions& opts = {});

namespace detail {

// Grid chain maximization: sup { sum_i w[i] phi[i] } over |phi_i| <= 1 - L,
// |phi_{i+1} - phi_i| <= L (nodes[i+1] - nodes[i]), for a fixed Lipschitz
// budget L in [0, 1]. Exposed for oracle tests.
double bl_chain_value(const std::vector<double>& nodes,
                      const std::vector<double>& weights, double lipschitz_budget);

// Maximum of bl_chain_value over the budget L in [0, 1] (the value of the
// full grid program; concave in L, found by golden section).
double bl_chain_max(const std::vector<double>& nodes,
                    const std::vector<double>& weights);

// Signed node weights of mu - nu on the given grid (atoms at their nodes,
// half of each cell's density mass lumped onto the two cell endpoints).
std::vector<double> bl_node_weights(const HybridMeasure& mu,
                                    const HybridMeasure& nu,
                                    const std::vector<double>& nodes);

// Merged grid of both measures' atoms and breakpoints plus refinement.
std::vector<double> bl_grid(const HybridMeasure& mu, const HybridMeasure& nu,
                            const BlOptions& opts);

}  // namespace detail

}  // namespace mtn

#endif  // MTN_BL_HPP
