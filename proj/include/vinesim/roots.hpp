#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "vinesim/common.hpp"

namespace vinesim {

/// Safeguarded 1D root finder: secant steps accepted only while they stay
/// inside the current bracket, bisection otherwise. Requires f(lo), f(hi)
/// of opposite sign. Converges to |hi - lo| <= xtol.
template <typename F>
double find_root_bracketed(F&& f, double lo, double hi, double flo, double fhi,
                           double xtol, int max_iter = 200) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw ConvergenceError("root finder: bracket does not straddle a root");
  double a = lo, b = hi, fa = flo, fb = fhi;
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    double x;
    double denom = fb - fa;
    if (std::fabs(denom) > 0) {
      x = b - fb * (b - a) / denom;  // secant
      double margin = 0.01 * (b - a);
      if (!(x > a + margin && x < b - margin)) x = 0.5 * (a + b);
    } else {
      x = 0.5 * (a + b);
    }
    double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
  }
  return 0.5 * (a + b);
}

template <typename F>
double find_root_bracketed(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  return find_root_bracketed(f, lo, hi, flo, fhi, xtol, max_iter);
}

/// Scan [lo, hi] at n points and return the first sub-interval where f
/// changes sign, as (a, b, fa, fb).
template <typename F>
std::optional<std::array<double, 4>> scan_first_bracket(F&& f, double lo, double hi, int n) {
  double prev_x = lo, prev_f = f(lo);
  for (int i = 1; i <= n; ++i) {
    double x = lo + (hi - lo) * double(i) / double(n);
    double fx = f(x);
    if (prev_f == 0.0) return std::array<double, 4>{prev_x, prev_x, 0.0, 0.0};
    if ((fx > 0) != (prev_f > 0)) return std::array<double, 4>{prev_x, x, prev_f, fx};
    prev_x = x;
    prev_f = fx;
  }
  return std::nullopt;
}

}  // namespace vinesim
