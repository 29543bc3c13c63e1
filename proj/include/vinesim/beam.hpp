#pragma once

#include <cmath>

#include "vinesim/common.hpp"
#include "vinesim/roots.hpp"
#include "vinesim/spam.hpp"

namespace vinesim {

/// Inflated-beam bending mechanics of the vine body. The restoring moment
/// follows the wrinkling model: above a critical surface strain the wrinkled
/// arc angle gamma_0 grows with the turning angle and the moment rises from
/// half the fully-wrinkled value toward pi * P_vine * R_vine^3.

struct VineBodyParams {
  double R_vine = 0.03335;              // inflated body radius [m]
  double P_vine = psi_to_pa(1.5);       // growth pressure [Pa]
  double eps_critical = 0.01;           // critical wrinkling strain
  double l_seg = 0.025;                 // discretization segment length [m]

  void validate() const {
    if (!(R_vine > 0 && P_vine > 0 && l_seg > 0))
      throw DomainError("VineBodyParams: all dimensions must be positive");
    if (!(eps_critical > 0 && eps_critical < 1))
      throw DomainError("VineBodyParams: eps_critical must lie in (0, 1)");
  }

  /// moment cap pi * P_vine * R_vine^3 [N m]
  double moment_scale() const { return kPi * P_vine * R_vine * R_vine * R_vine; }
};

/// moment arm of the actuator about a joint [m]
inline double actuation_arm(const VineBodyParams& body, double R_act) {
  return 2.0 * body.R_vine + R_act;
}

/// Dimensionless factor of the wrinkled-regime moment as a function of the
/// wrinkled arc angle gamma_0 in [0, pi): 1/2 at onset, -> 1 as gamma_0 -> pi.
/// Near pi both numerator and denominator are O((pi-gamma_0)^3) and cancel
/// catastrophically in doubles, so that neighborhood uses their series.
inline double wrinkled_moment_factor(double gamma0) {
  double d = kPi - gamma0;
  if (d < 0.01) {
    double d2 = d * d;
    double num = 1.0 - d2 / 5.0 + 2.0 * d2 * d2 / 105.0;
    double den = 1.0 - d2 / 10.0 + d2 * d2 / 280.0;
    return num / den;
  }
  double num = std::sin(2.0 * gamma0) + 2.0 * kPi - 2.0 * gamma0;
  double den = 4.0 * (std::sin(gamma0) + (kPi - gamma0) * std::cos(gamma0));
  return num / den;
}

/// Restoring moment M(theta) [N m] for unsigned bending angle theta.
/// Below wrinkling onset (sin(theta/2) < eps_critical) the moment ramps
/// linearly in sin(theta/2) so that it is 0 at theta = 0 and continuous at
/// onset, where the wrinkled expression equals half the moment cap.
inline double restoring_moment(const VineBodyParams& body, double theta) {
  body.validate();
  if (theta < 0) throw DomainError("restoring_moment: theta must be >= 0");
  double s = std::sin(0.5 * theta);
  double cap = body.moment_scale();
  if (s < body.eps_critical) return 0.5 * cap * s / body.eps_critical;
  double arg = 2.0 * body.eps_critical / s - 1.0;  // in (-1, 1] by the regime test
  double gamma0 = std::acos(arg);
  return cap * wrinkled_moment_factor(gamma0);
}

/// Actuator strain produced by bending angle theta over one segment.
inline double segment_strain(const VineBodyParams& body, double R_act, double theta) {
  if (theta < 0) throw DomainError("segment_strain: theta must be >= 0");
  return actuation_arm(body, R_act) * theta / body.l_seg;
}

/// Net restoring moment of a segment: body resistance minus actuation.
inline double net_moment(const VineBodyParams& body, double R_act, double theta,
                         double F_t) {
  if (F_t < 0) throw DomainError("net_moment: F_t must be >= 0");
  return restoring_moment(body, theta) - F_t * actuation_arm(body, R_act);
}

/// Precomputed strain->force inversion for one geometry. Hoists the feasible
/// contraction bounds so repeated queries avoid re-deriving them. Force is
/// exactly linear in pressure, so only the unit-pressure curve is solved.
class SpamForceCurve {
 public:
  explicit SpamForceCurve(const SpamGeometry& geom)
      : geom_(geom), m_lo_(m_at_zero_strain(geom)), eps_hi_(vinesim::max_strain(geom)) {}

  const SpamGeometry& geometry() const { return geom_; }
  double min_contraction() const { return m_lo_; }
  double max_strain() const { return eps_hi_; }

  /// F_t / P_act at the given strain [N/Pa]; 0 past full contraction,
  /// blocked force below zero strain.
  double force_per_pa(double eps) const {
    if (eps >= eps_hi_) return 0.0;
    double m;
    if (eps <= 0.0) {
      m = m_lo_;
    } else {
      auto f = [&](double mm) { return solve_strain_force(geom_, mm, 0.0).eps - eps; };
      m = find_root_bracketed(f, m_lo_, 0.5, 1e-12);
    }
    SpamState st = solve_strain_force(geom_, m, 1.0);
    return st.F_t;
  }

  double force(double P_act, double eps) const {
    return P_act <= 0.0 ? 0.0 : P_act * force_per_pa(eps);
  }

 private:
  SpamGeometry geom_;
  double m_lo_;
  double eps_hi_;
};

/// Equilibrium bending angle theta* in [0, theta_max] where the restoring
/// moment balances the actuation moment, with the actuator force evaluated at
/// the strain produced by theta* itself. Returns 0 when actuation cannot
/// overcome wrinkling onset. |M_tot(theta*)| <= 1e-9 N m at the returned
/// angle. Throws ConvergenceError when M_tot has no sign change.
/// This overload takes a prebuilt force curve (cheaper inside sweeps).
inline double free_space_equilibrium(const VineBodyParams& body, const SpamForceCurve& curve,
                                     double P_act, double theta_max = kPi / 2) {
  if (P_act <= 0.0) return 0.0;
  double arm = actuation_arm(body, curve.geometry().R_act);
  auto m_tot = [&](double theta) {
    double eps = segment_strain(body, curve.geometry().R_act, theta);
    return restoring_moment(body, theta) - curve.force(P_act, eps) * arm;
  };
  double lo = 1e-9;
  if (m_tot(lo) >= 0.0) return 0.0;  // onset resists even infinitesimal bending
  auto bracket = scan_first_bracket(m_tot, lo, theta_max, 64);
  if (!bracket)
    throw ConvergenceError("free_space_equilibrium: no moment balance in [0, theta_max]");
  auto [a, b, fa, fb] = *bracket;
  // bisect on the moment value itself: contract until |M_tot| <= 1e-9 N m
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (a + b);
    double fm = m_tot(mid);
    if (std::fabs(fm) <= 1e-9 || (b - a) < 1e-15) return mid;
    if ((fm > 0) == (fb > 0)) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  throw ConvergenceError("free_space_equilibrium: bisection stalled");
}

inline double free_space_equilibrium(const VineBodyParams& body, const SpamGeometry& geom,
                                     double P_act, double theta_max = kPi / 2) {
  body.validate();
  if (P_act <= 0.0) return 0.0;
  SpamForceCurve curve(geom);
  return free_space_equilibrium(body, curve, P_act, theta_max);
}

}  // namespace vinesim
