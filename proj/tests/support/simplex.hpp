// SPDX-License-Identifier: Apache-2.0
//
// Textbook dense simplex used only as an independent oracle in tests:
// maximize c^T z subject to A z <= b, z >= 0, with b >= 0 so the slack basis
// is feasible. Bland's rule guarantees termination on the heavily degenerate
// instances produced by the BL dual norm.
#ifndef MTN_TESTS_SIMPLEX_HPP
#define MTN_TESTS_SIMPLEX_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mtn_tests {

struct SimplexResult {
  double value = 0.0;
  std::vector<double> z;
};

inline SimplexResult simplex_maximize(const std::vector<std::vector<double>>& A,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c) {
  const size_t m = A.size();
  const size_t n = c.size();
  for (double bi : b) {
    if (bi < 0.0) throw std::invalid_argument("simplex oracle needs b >= 0");
  }
  // Tableau with slack columns: rows 0..m-1 constraints, row m objective.
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i].back() = b[i];
  }
  for (size_t j = 0; j < n; ++j) t[m][j] = -c[j];
  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = n + i;

  const double eps = 1e-11;
  for (long iter = 0; iter < 200000; ++iter) {
    // Bland: smallest-index entering column with a negative reduced cost.
    size_t pivot_col = n + m;
    for (size_t j = 0; j < n + m; ++j) {
      if (t[m][j] < -eps) {
        pivot_col = j;
        break;
      }
    }
    if (pivot_col == n + m) {
      SimplexResult r;
      r.value = t[m].back();
      r.z.assign(n, 0.0);
      for (size_t i = 0; i < m; ++i) {
        if (basis[i] < n) r.z[basis[i]] = t[i].back();
      }
      return r;
    }
    // Bland: among the min-ratio rows, the one whose basic variable has the
    // smallest index.
    size_t pivot_row = m;
    double best_ratio = 0.0;
    for (size_t i = 0; i < m; ++i) {
      if (t[i][pivot_col] > eps) {
        const double ratio = t[i].back() / t[i][pivot_col];
        if (pivot_row == m || ratio < best_ratio - eps ||
            (std::abs(ratio - best_ratio) <= eps && basis[i] < basis[pivot_row])) {
          pivot_row = i;
          best_ratio = ratio;
        }
      }
    }
    if (pivot_row == m) throw std::runtime_error("simplex oracle: unbounded");
    const double p = t[pivot_row][pivot_col];
    for (double& x : t[pivot_row]) x /= p;
    for (size_t i = 0; i <= m; ++i) {
      if (i == pivot_row) continue;
      const double f = t[i][pivot_col];
      if (f == 0.0) continue;
      for (size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[pivot_row][j];
    }
    basis[pivot_row] = pivot_col;
  }
  throw std::runtime_error("simplex oracle: iteration limit");
}

// Chain program at a fixed budget: maximize sum w_i phi_i over |phi_i| <= s,
// |phi_{i+1} - phi_i| <= c_i, as a plain LP on split variables.
inline double bl_chain_lp_oracle(const std::vector<double>& nodes,
                                 const std::vector<double>& w, double s,
                                 double lipschitz) {
  const size_t n = nodes.size();
  const size_t NV = 2 * n;  // phi = phi+ - phi-
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  auto row = [&](double rhs) -> std::vector<double>& {
    A.emplace_back(NV, 0.0);
    b.push_back(rhs);
    return A.back();
  };
  for (size_t i = 0; i < n; ++i) {
    {
      auto& r = row(s);
      r[i] = 1.0;
      r[n + i] = -1.0;
    }
    {
      auto& r = row(s);
      r[i] = -1.0;
      r[n + i] = 1.0;
    }
  }
  for (size_t i = 0; i + 1 < n; ++i) {
    const double c = lipschitz * (nodes[i + 1] - nodes[i]);
    {
      auto& r = row(c);
      r[i + 1] = 1.0;
      r[n + i + 1] = -1.0;
      r[i] = -1.0;
      r[n + i] = 1.0;
    }
    {
      auto& r = row(c);
      r[i + 1] = -1.0;
      r[n + i + 1] = 1.0;
      r[i] = 1.0;
      r[n + i] = -1.0;
    }
  }
  std::vector<double> c(NV, 0.0);
  for (size_t i = 0; i < n; ++i) {
    c[i] = w[i];
    c[n + i] = -w[i];
  }
  return simplex_maximize(A, b, c).value;
}

// The BL dual-norm program on a fixed grid, solved directly as an LP:
// variables phi_i (split into +/- parts), s and L; constraints
// |phi_i| <= s, |phi_{i+1} - phi_i| <= L h_i, s + L <= 1.
inline double bl_lp_oracle(const std::vector<double>& nodes,
                           const std::vector<double>& w) {
  const size_t n = nodes.size();
  // z = (phi+_0..phi+_{n-1}, phi-_0..phi-_{n-1}, s, L)
  const size_t NV = 2 * n + 2;
  const size_t S = 2 * n;
  const size_t L = 2 * n + 1;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  auto row = [&]() -> std::vector<double>& {
    A.emplace_back(NV, 0.0);
    b.push_back(0.0);
    return A.back();
  };
  for (size_t i = 0; i < n; ++i) {
    {
      auto& r = row();  // phi_i - s <= 0
      r[i] = 1.0;
      r[n + i] = -1.0;
      r[S] = -1.0;
    }
    {
      auto& r = row();  // -phi_i - s <= 0
      r[i] = -1.0;
      r[n + i] = 1.0;
      r[S] = -1.0;
    }
  }
  for (size_t i = 0; i + 1 < n; ++i) {
    const double h = nodes[i + 1] - nodes[i];
    {
      auto& r = row();  // phi_{i+1} - phi_i - h L <= 0
      r[i + 1] = 1.0;
      r[n + i + 1] = -1.0;
      r[i] = -1.0;
      r[n + i] = 1.0;
      r[L] = -h;
    }
    {
      auto& r = row();
      r[i + 1] = -1.0;
      r[n + i + 1] = 1.0;
      r[i] = 1.0;
      r[n + i] = -1.0;
      r[L] = -h;
    }
  }
  {
    auto& r = row();  // s + L <= 1
    r[S] = 1.0;
    r[L] = 1.0;
    b.back() = 1.0;
  }
  std::vector<double> c(NV, 0.0);
  for (size_t i = 0; i < n; ++i) {
    c[i] = w[i];
    c[n + i] = -w[i];
  }
  return simplex_maximize(A, b, c).value;
}

}  // namespace mtn_tests

#endif  // MTN_TESTS_SIMPLEX_HPP
