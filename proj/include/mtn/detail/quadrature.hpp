// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_DETAIL_QUADRATURE_HPP
#define MTN_DETAIL_QUADRATURE_HPP

#include <cmath>
#include <functional>

namespace mtn::detail {

// Adaptive Simpson with Richardson acceptance test.
inline double simpson_panel(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fb,
                                   double fm, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_panel(a, fa, m, fm, flm);
  const double right = simpson_panel(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson_panel(a, fa, b, fb, fm);
  return adaptive_simpson_rec(f, a, b, fa, fb, fm, whole, tol, max_depth);
}

// 10-point Gauss-Legendre on [a, b].
inline double gauss10(const std::function<double(double)>& f, double a, double b) {
  static const double xs[5] = {0.1488743389816312, 0.4333953941292472,
                               0.6794095682990244, 0.8650633666889845,
                               0.9739065285171717};
  static const double ws[5] = {0.2955242247147529, 0.2692667193099963,
                               0.2190863625159820, 0.1494513491505806,
                               0.0666713443086881};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = h * xs[i];
    s += ws[i] * (f(c - d) + f(c + d));
  }
  return s * h;
}

inline double adaptive_gauss_rec(const std::function<double(double)>& f,
                                 double a, double b, double whole, double tol,
                                 int depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss10(f, a, m);
  const double right = gauss10(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
  return adaptive_gauss_rec(f, a, m, left, 0.5 * tol, depth - 1) +
         adaptive_gauss_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

inline double adaptive_gauss(const std::function<double(double)>& f, double a,
                             double b, double tol, int max_depth = 24) {
  if (!(b > a)) return 0.0;
  return adaptive_gauss_rec(f, a, b, gauss10(f, a, b), tol, max_depth);
}

}  // namespace mtn::detail

#endif  // MTN_DETAIL_QUADRATURE_HPP
