#pragma once

#include <cmath>

#include "vinesim/common.hpp"

namespace vinesim {

/// Incomplete Legendre elliptic integrals of the first and second kind,
/// F(phi, m) and E(phi, m), in the parameter convention m = k^2:
///
///   F(phi, m) = int_0^phi dt / sqrt(1 - m sin^2 t)
///   E(phi, m) = int_0^phi sqrt(1 - m sin^2 t) dt
///
/// Evaluated through Carlson symmetric forms R_F and R_D with the duplication
/// theorem, which converges to machine precision on the supported domain
/// phi in [0, pi/2], m in [0, 1]. The corner (m = 1, phi = pi/2) is a
/// logarithmic singularity of F and is rejected.

struct EllipticArgs {
  double phi;  // amplitude angle, radians, in [0, pi/2]
  double m;    // parameter (= modulus squared), in [0, 1]
};

namespace detail {

/// Carlson R_F(x, y, z); requires at most one of x, y, z zero.
/// Duplication converges with relative error ~ tol^6.
inline double carlson_rf(double x, double y, double z) {
  constexpr double kTol = 1e-4;
  double dx, dy, dz;
  int iter = 0;
  do {
    double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    double lam = sx * (sy + sz) + sy * sz;
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
    double mu = (x + y + z) / 3.0;
    dx = (mu - x) / mu;
    dy = (mu - y) / mu;
    dz = (mu - z) / mu;
  } while ((std::fabs(dx) > kTol || std::fabs(dy) > kTol || std::fabs(dz) > kTol) &&
           ++iter < 100);
  double e2 = dx * dy - dz * dz;
  double e3 = dx * dy * dz;
  double mu = (x + y + z) / 3.0;
  return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mu);
}

/// Carlson R_D(x, y, z); z must be positive.
inline double carlson_rd(double x, double y, double z) {
  constexpr double kTol = 1e-4;
  double sum = 0.0;
  double fac = 1.0;
  double dx, dy, dz;
  int iter = 0;
  do {
    double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    double lam = sx * (sy + sz) + sy * sz;
    sum += fac / (sz * (z + lam));
    fac *= 0.25;
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
    double mu = (x + y + 3.0 * z) / 5.0;
    dx = (mu - x) / mu;
    dy = (mu - y) / mu;
    dz = (mu - z) / mu;
  } while ((std::fabs(dx) > kTol || std::fabs(dy) > kTol || std::fabs(dz) > kTol) &&
           ++iter < 100);
  double ea = dx * dy;
  double eb = dz * dz;
  double ec = ea - eb;
  double ed = ea - 6.0 * eb;
  double ee = ed + ec + ec;
  double mu = (x + y + 3.0 * z) / 5.0;
  return 3.0 * sum +
         fac *
             (1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee) +
              dz * (1.0 / 6.0 * ee + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea))) /
             (mu * std::sqrt(mu));
}

inline void check_args(const EllipticArgs& a) {
  if (!(a.phi >= 0.0 && a.phi <= kPi / 2.0 + 1e-15))
    throw DomainError("elliptic: phi outside [0, pi/2]");
  if (!(a.m >= 0.0 && a.m <= 1.0)) throw DomainError("elliptic: m outside [0, 1]");
}

}  // namespace detail

/// F(phi, m). Throws DomainError outside the domain and at the singular
/// corner (m = 1, phi = pi/2), where the integral diverges.
inline double ellip_F(const EllipticArgs& args) {
  detail::check_args(args);
  double s = std::sin(args.phi);
  double c = std::cos(args.phi);
  double y = 1.0 - args.m * s * s;
  if (y <= 0.0) throw DomainError("ellip_F: singular at m = 1, phi = pi/2");
  if (s == 0.0) return 0.0;
  return s * detail::carlson_rf(c * c, y, 1.0);
}

/// E(phi, m). Finite on the whole domain; E(pi/2, 1) = 1.
inline double ellip_E(const EllipticArgs& args) {
  detail::check_args(args);
  double s = std::sin(args.phi);
  double c = std::cos(args.phi);
  double y = 1.0 - args.m * s * s;
  if (s == 0.0) return 0.0;
  if (y <= 0.0) return 1.0;  // E(phi, 1) = sin(phi); reached only at the corner
  double s3 = s * s * s;
  return s * detail::carlson_rf(c * c, y, 1.0) -
         (args.m / 3.0) * s3 * detail::carlson_rd(c * c, y, 1.0);
}

inline double ellip_F(double phi, double m) { return ellip_F(EllipticArgs{phi, m}); }
inline double ellip_E(double phi, double m) { return ellip_E(EllipticArgs{phi, m}); }

}  // namespace vinesim
