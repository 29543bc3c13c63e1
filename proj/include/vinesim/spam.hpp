#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "vinesim/common.hpp"
#include "vinesim/elliptic.hpp"
#include "vinesim/roots.hpp"

namespace vinesim {

/// Ground-truth series pneumatic artificial muscle (sPAM) force-strain model.
///
/// The governing system couples two dimensionless parameters: m, the extent of
/// contraction relative to full contraction (m in (0, 0.5], force vanishes at
/// m = 0.5), and phi_Rc, the angle whose cosine is R_c over the bulge radius.
/// The bulge radius saturates at the tube radius R_act; past that point the
/// active length l_a shrinks below the unit length l_0 while phi_Rc stays at
/// acos(R_c / R_act).

struct SpamGeometry {
  double R_c = 0.005;      // constriction radius [m]
  double R_act = 0.01718;  // actuator tube radius [m]
  double l_0 = 0.030;      // actuator unit length [m]
  double a_corr = 1e-4;    // empirical pressure correction constant

  void validate() const {
    if (!(R_c > 0 && R_act > R_c)) throw DomainError("SpamGeometry: need 0 < R_c < R_act");
    if (!(l_0 > 0)) throw DomainError("SpamGeometry: l_0 must be positive");
    if (!(a_corr > 0)) throw DomainError("SpamGeometry: a_corr must be positive");
  }
};

enum class SpamRegime { kUnsaturated, kSaturated };

struct SpamState {
  double m = 0;       // contraction-extent parameter, in (0, 0.5]
  double phi_Rc = 0;  // radius angle [rad], in (0, pi/2]
  double l_a = 0;     // active length [m], in (0, l_0]
  double eps = 0;     // strain, in [0, 1)
  double F_t = 0;     // contraction force [N]
  double P_act = 0;   // actuator pressure [Pa]
  SpamRegime regime = SpamRegime::kUnsaturated;
};

inline double phi_saturated(const SpamGeometry& g) {
  g.validate();
  return std::acos(g.R_c / g.R_act);
}

/// Normalized residuals of the two governing equations at (m, phi, l_a, eps).
/// Both are scaled by R_c / l_0 so "residual" is dimensionless and O(1).
inline std::array<double, 2> spam_residuals(const SpamGeometry& g, double m, double phi,
                                            double l_a, double eps) {
  double c = std::cos(phi);
  double sm = std::sqrt(m);
  double F = ellip_F(phi, m);
  double E = ellip_E(phi, m);
  double r1 = (E - 0.5 * F) * 2.0 * g.R_c / (sm * c * g.l_0) - (l_a / g.l_0 - eps);
  double r2 = F * g.R_c / (sm * c * g.l_0) -
              (l_a / g.l_0) * (1.0 + g.a_corr / (2.0 * m * c * c));
  return {r1, r2};
}

namespace detail {

/// Physical (lower) root of the length equation in phi for the unsaturated
/// regime (l_a = l_0). The equation has a spurious second root where the
/// a_corr/cos^2 term blows up; the scan is capped safely below it.
inline double solve_unsaturated_phi(const SpamGeometry& g, double m) {
  auto f = [&](double phi) {
    double c = std::cos(phi);
    return ellip_F(phi, m) * g.R_c / (std::sqrt(m) * c * g.l_0) -
           (1.0 + g.a_corr / (2.0 * m * c * c));
  };
  // spurious root sits near cos(phi) ~ sqrt(a/2m); stop at twice that cosine
  double c_cap = clamp(2.0 * std::sqrt(g.a_corr / (2.0 * m)), 1e-9, 0.9);
  double phi_hi = std::acos(c_cap);
  auto bracket = scan_first_bracket(f, 1e-8, phi_hi, 48);
  if (!bracket)  // fall back to a fine scan of the whole interval
    bracket = scan_first_bracket(f, 1e-8, kPi / 2 - 1e-9, 2048);
  if (!bracket)
    throw ConvergenceError("spam: no unsaturated root for m = " + std::to_string(m));
  auto [a, b, fa, fb] = *bracket;
  return find_root_bracketed(f, a, b, fa, fb, 1e-13);
}

}  // namespace detail

/// Solve the force-strain system at contraction parameter m. The unsaturated
/// branch is attempted first; if its phi_Rc exceeds the saturation angle the
/// bulge radius would exceed R_act, so the saturated branch applies (phi_Rc
/// pinned, l_a < l_0 solved). Strain is total strain against l_0.
inline SpamState solve_strain_force(const SpamGeometry& g, double m, double P_act) {
  g.validate();
  if (m > 0.5 && m <= 0.5 + 1e-12) m = 0.5;  // grid endpoints may round past 0.5
  if (!(m > 0.0 && m <= 0.5)) throw DomainError("spam: m must lie in (0, 0.5]");
  if (P_act < 0.0) throw DomainError("spam: negative pressure");

  double phi_sat = phi_saturated(g);
  SpamState st;
  st.m = m;
  st.P_act = P_act;

  double phi = detail::solve_unsaturated_phi(g, m);
  if (phi <= phi_sat) {
    st.regime = SpamRegime::kUnsaturated;
    st.phi_Rc = phi;
    st.l_a = g.l_0;
  } else {
    st.regime = SpamRegime::kSaturated;
    st.phi_Rc = phi_sat;
    double c = std::cos(phi_sat);
    double F = ellip_F(phi_sat, m);
    st.l_a = g.R_c * F / (std::sqrt(m) * c * (1.0 + g.a_corr / (2.0 * m * c * c)));
  }

  {
    double c = std::cos(st.phi_Rc);
    double F = ellip_F(st.phi_Rc, m);
    double E = ellip_E(st.phi_Rc, m);
    st.eps = (st.l_a - 2.0 * g.R_c * (E - 0.5 * F) / (std::sqrt(m) * c)) / g.l_0;
    st.F_t = kPi * P_act * g.R_c * g.R_c * (1.0 - 2.0 * m) / (2.0 * m * c * c);
  }

  if (!(st.l_a > 0 && st.l_a <= g.l_0 * (1.0 + 1e-12)))
    throw InfeasibleError("spam: active length outside (0, l_0]");
  if (!(st.eps >= -1e-12 && st.eps < 1.0))
    throw InfeasibleError("spam: strain outside [0, 1) at m = " + std::to_string(m));
  if (st.eps < 0) st.eps = 0;
  if (!(st.F_t >= 0)) throw InfeasibleError("spam: negative force");
  return st;
}

/// Smallest m with non-negative strain; below it the solved strain is
/// negative (the pressure correction term dominates) and states are
/// infeasible. This is the zero-strain (blocked force) end of the curve.
inline double m_at_zero_strain(const SpamGeometry& g) {
  auto eps_of = [&](double m) {
    double phi_sat = phi_saturated(g);
    double phi = detail::solve_unsaturated_phi(g, m);
    double l_a = g.l_0;
    if (phi > phi_sat) {
      phi = phi_sat;
      double c = std::cos(phi);
      l_a = g.R_c * ellip_F(phi, m) /
            (std::sqrt(m) * c * (1.0 + g.a_corr / (2.0 * m * c * c)));
    }
    double c = std::cos(phi);
    double F = ellip_F(phi, m);
    double E = ellip_E(phi, m);
    return (l_a - 2.0 * g.R_c * (E - 0.5 * F) / (std::sqrt(m) * c)) / g.l_0;
  };
  double lo = 1e-4, hi = 0.5;
  if (eps_of(lo) >= 0.0) return lo;
  return find_root_bracketed(eps_of, lo, hi, 1e-12);
}

/// Strain at full contraction (m = 0.5), the upper end of the curve.
inline double max_strain(const SpamGeometry& g) {
  return solve_strain_force(g, 0.5, 0.0).eps;
}

/// n force-strain pairs spanning the feasible contraction range
/// [m(eps = 0), 0.5], sorted by strain ascending. The last pair has F_t = 0.
inline std::vector<std::pair<double, double>> sample_curve(const SpamGeometry& g,
                                                           double P_act, int n) {
  if (n < 2) throw DomainError("sample_curve: need n >= 2");
  if (!(P_act > 0)) throw DomainError("sample_curve: need positive pressure");
  double m_lo = m_at_zero_strain(g);
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double m = m_lo + (0.5 - m_lo) * double(i) / double(n - 1);
    SpamState st = solve_strain_force(g, m, P_act);
    out.emplace_back(st.eps, st.F_t);
  }
  return out;
}

/// Contraction force at a prescribed strain: inverts the monotone eps(m)
/// relation. Strains past full contraction give zero force; negative strains
/// clamp to the blocked force at eps = 0.
inline double force_at_strain(const SpamGeometry& g, double P_act, double eps) {
  if (P_act <= 0.0) return 0.0;
  double m_lo = m_at_zero_strain(g);
  double e_hi = solve_strain_force(g, 0.5, P_act).eps;
  if (eps >= e_hi) return 0.0;
  if (eps <= 0.0) return solve_strain_force(g, m_lo, P_act).F_t;
  auto f = [&](double m) { return solve_strain_force(g, m, 0.0).eps - eps; };
  double m = find_root_bracketed(f, m_lo, 0.5, 1e-12);
  return solve_strain_force(g, m, P_act).F_t;
}

}  // namespace vinesim
