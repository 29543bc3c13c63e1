#pragma once

// Test-only numerical oracles, independent of the library implementations
// they check.

#include <cmath>
#include <functional>

namespace oracles {

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb, double whole,
                                   double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Defining integral of the incomplete elliptic integral of the first kind.
inline double elliptic_F_quadrature(double phi, double m, double tol = 1e-12) {
  return integrate([m](double t) { double s = std::sin(t); return 1.0 / std::sqrt(1.0 - m * s * s); },
                   0.0, phi, tol);
}

/// Defining integral of the incomplete elliptic integral of the second kind.
inline double elliptic_E_quadrature(double phi, double m, double tol = 1e-12) {
  return integrate([m](double t) { double s = std::sin(t); return std::sqrt(1.0 - m * s * s); },
                   0.0, phi, tol);
}

}  // namespace oracles
