#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "vinesim/beam.hpp"
#include "vinesim/common.hpp"
#include "vinesim/design.hpp"
#include "vinesim/spam.hpp"

namespace vinesim {

/// Design synthesis: map a target per-segment curvature to fabrication
/// parameters (P_act, l_0). Stage 1 fixes the strain and required force from
/// the moment balance at the target angle; stage 2 recovers the sPAM
/// parameters (m, phi_Rc), by Levenberg-Marquardt on the unsaturated system
/// and in closed form on the saturated one. Among feasible discrete designs
/// the highest pressure wins.

struct LmOptions {
  int starts = 1000;
  double tol = 1e-6;         // residual norm target
  double lambda0 = 1e-3;     // initial damping
  double lambda_factor = 10; // up/down scaling
  int max_iter = 200;
};

struct LmResult {
  double m = 0;
  double phi = 0;
  double residual_norm = 0;
  int iterations = 0;
};

/// Levenberg-Marquardt for a 2-residual system over (m, phi_Rc), seeded by
/// the lowest-residual candidate of `starts` uniform samples in the box.
/// Deterministic given the seed; ties in the multistart break by index.
inline LmResult lm_solve(const std::function<std::array<double, 2>(double, double)>& system,
                         std::array<double, 2> m_box, std::array<double, 2> phi_box,
                         int starts, uint64_t seed, const LmOptions& opt = {}) {
  if (starts < 1) throw DomainError("lm_solve: need starts >= 1");
  auto norm2 = [&](double m, double phi) {
    auto r = system(m, phi);
    return r[0] * r[0] + r[1] * r[1];
  };

  Rng rng(seed);
  double best_m = 0, best_phi = 0, best_n2 = 1e300;
  for (int i = 0; i < starts; ++i) {
    double m = rng.uniform(m_box[0], m_box[1]);
    double phi = rng.uniform(phi_box[0], phi_box[1]);
    double n2 = norm2(m, phi);
    if (n2 < best_n2) {
      best_n2 = n2;
      best_m = m;
      best_phi = phi;
    }
  }

  double m = best_m, phi = best_phi;
  auto r = system(m, phi);
  double n2 = r[0] * r[0] + r[1] * r[1];
  double lambda = opt.lambda0;
  int iter = 0;
  for (; iter < opt.max_iter && std::sqrt(n2) > opt.tol; ++iter) {
    // central-difference Jacobian
    double hm = 1e-7 * std::max(1.0, std::fabs(m));
    double hp = 1e-7 * std::max(1.0, std::fabs(phi));
    auto rp = system(clamp(m + hm, m_box[0], m_box[1]), phi);
    auto rm = system(clamp(m - hm, m_box[0], m_box[1]), phi);
    auto pp = system(m, clamp(phi + hp, phi_box[0], phi_box[1]));
    auto pm = system(m, clamp(phi - hp, phi_box[0], phi_box[1]));
    double J[2][2] = {{(rp[0] - rm[0]) / (2 * hm), (pp[0] - pm[0]) / (2 * hp)},
                      {(rp[1] - rm[1]) / (2 * hm), (pp[1] - pm[1]) / (2 * hp)}};
    // normal equations with damping on the diagonal
    double a = J[0][0] * J[0][0] + J[1][0] * J[1][0];
    double b = J[0][0] * J[0][1] + J[1][0] * J[1][1];
    double d = J[0][1] * J[0][1] + J[1][1] * J[1][1];
    double g0 = -(J[0][0] * r[0] + J[1][0] * r[1]);
    double g1 = -(J[0][1] * r[0] + J[1][1] * r[1]);
    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      double aa = a * (1 + lambda), dd = d * (1 + lambda);
      double det = aa * dd - b * b;
      if (std::fabs(det) < 1e-300) {
        lambda *= opt.lambda_factor;
        continue;
      }
      double dm = (dd * g0 - b * g1) / det;
      double dphi = (aa * g1 - b * g0) / det;
      double m_new = clamp(m + dm, m_box[0], m_box[1]);
      double phi_new = clamp(phi + dphi, phi_box[0], phi_box[1]);
      double n2_new = norm2(m_new, phi_new);
      if (n2_new < n2) {
        m = m_new;
        phi = phi_new;
        r = system(m, phi);
        n2 = n2_new;
        lambda = std::max(1e-12, lambda / opt.lambda_factor);
        stepped = true;
        break;
      }
      lambda *= opt.lambda_factor;
    }
    if (!stepped) break;
  }
  if (std::sqrt(n2) > opt.tol)
    throw ConvergenceError("lm_solve: no convergence; best residual " +
                           std::to_string(std::sqrt(n2)));
  return {m, phi, std::sqrt(n2), iter};
}

/// The sPAM governing system at fixed (l_a, eps) as a residual function over
/// (m, phi_Rc) — the stage-2 system of the synthesis procedure.
inline std::function<std::array<double, 2>(double, double)> spam_system(
    const SpamGeometry& geom, double l_a, double eps) {
  return [geom, l_a, eps](double m, double phi) {
    return spam_residuals(geom, m, phi, l_a, eps);
  };
}

struct SynthesisResult {
  bool null_design = false;  // target curvature ~ 0: no actuator
  double P_act = 0;          // [Pa]
  double l_0 = 0;            // [m], snapped to the catalog grid
  double m = 0;
  double phi_Rc = 0;
  double achieved_theta = 0;  // free-space equilibrium of the discrete design
  SpamRegime regime = SpamRegime::kUnsaturated;
};

namespace detail {

/// Continuous unsaturated synthesis at one pressure: LM over (m, phi) on
/// {Eq 1a with l_0 eliminated through Eq 1b, Eq 1d force match}.
inline std::optional<std::array<double, 3>> synth_unsaturated(
    const SpamGeometry& geom, double P_act, double eps_target, double F_target,
    uint64_t seed, double l_lo, double l_hi) {
  double kappa = F_target / (kPi * P_act * geom.R_c * geom.R_c);
  double phi_sat = phi_saturated(geom);
  // strain match (scale-free) and log-scale force match keep the Jacobian
  // well conditioned; the raw force ratio spans orders of magnitude
  auto system = [&](double m, double phi) -> std::array<double, 2> {
    double c = std::cos(phi);
    double sm = std::sqrt(m);
    double F = ellip_F(phi, m);
    double E = ellip_E(phi, m);
    double l0 = geom.R_c * F / (sm * c * (1.0 + geom.a_corr / (2.0 * m * c * c)));
    double eps = 1.0 - 2.0 * geom.R_c * (E - 0.5 * F) / (sm * c * l0);
    double r1 = (eps - eps_target) / std::max(0.05, eps_target);
    double r2 = 0.25 * (std::log((1.0 - 2.0 * m) / (2.0 * m * c * c)) - std::log(kappa));
    return {r1, r2};
  };
  LmResult lm;
  try {
    lm = lm_solve(system, {1e-3, 0.4999}, {0.05, phi_sat}, 1000, seed);
  } catch (const ConvergenceError&) {
    return std::nullopt;
  }
  double c = std::cos(lm.phi);
  double l0 = geom.R_c * ellip_F(lm.phi, lm.m) /
              (std::sqrt(lm.m) * c * (1.0 + geom.a_corr / (2.0 * lm.m * c * c)));
  if (!(l0 >= l_lo - 5e-4 && l0 <= l_hi + 5e-4)) return std::nullopt;
  return std::array<double, 3>{lm.m, lm.phi, l0};
}

/// Saturated synthesis is closed form: Eq 1d pins m, Eq 1b pins l_a, Eq 1a
/// then yields l_0 at the target strain.
inline std::optional<std::array<double, 3>> synth_saturated(const SpamGeometry& geom,
                                                            double P_act, double eps_target,
                                                            double F_target, double l_lo,
                                                            double l_hi) {
  double phi = phi_saturated(geom);
  double c = std::cos(phi);
  double kappa = F_target / (kPi * P_act * geom.R_c * geom.R_c);
  double m = 1.0 / (2.0 * (1.0 + kappa * c * c));
  if (!(m > 1e-3 && m <= 0.5)) return std::nullopt;
  double sm = std::sqrt(m);
  double F = ellip_F(phi, m);
  double E = ellip_E(phi, m);
  double l_a = geom.R_c * F / (sm * c * (1.0 + geom.a_corr / (2.0 * m * c * c)));
  if (eps_target <= 1e-9) return std::nullopt;
  double l0 = (l_a - 2.0 * geom.R_c * (E - 0.5 * F) / (sm * c)) / eps_target;
  if (!(l0 > l_a)) return std::nullopt;  // saturated means the active length shrank
  if (!(l0 >= l_lo - 5e-4 && l0 <= l_hi + 5e-4)) return std::nullopt;
  return std::array<double, 3>{m, phi, l0};
}

}  // namespace detail

/// Feasible curvature range of a catalog: smallest nonzero and largest
/// free-space equilibrium over the discrete (P_act, l_0) grid.
inline std::array<double, 2> curvature_bounds(const DesignCatalog& catalog,
                                              const VineBodyParams& body,
                                              const SpamGeometry& geom) {
  catalog.validate();
  double theta_max = 0, theta_min = 1e300;
  for (int i = 0; i < catalog.length_steps(); ++i) {
    SpamGeometry g = geom;
    g.l_0 = catalog.length_at(i);
    SpamForceCurve curve(g);
    for (double P : catalog.pressures) {
      if (P <= 0) continue;
      double th = free_space_equilibrium(body, curve, P);
      theta_max = std::max(theta_max, th);
      if (th > 1e-6) theta_min = std::min(theta_min, th);
    }
  }
  if (theta_min > theta_max) theta_min = 0.0;
  return {theta_min, theta_max};
}

/// Synthesize fabrication parameters for one target per-segment curvature.
/// Tolerance for feasibility: the discrete design's free-space equilibrium
/// must reproduce theta_curv within 5% relative.
inline SynthesisResult synthesize(double theta_curv, const DesignCatalog& catalog,
                                  const VineBodyParams& body, const SpamGeometry& geom,
                                  uint64_t seed = 12345) {
  catalog.validate();
  body.validate();
  if (theta_curv < 0) throw DomainError("synthesize: theta_curv must be >= 0");
  if (theta_curv == 0.0) {
    SynthesisResult r;
    r.null_design = true;
    return r;
  }

  const double eps_target = segment_strain(body, geom.R_act, theta_curv);
  const double F_target = restoring_moment(body, theta_curv) / actuation_arm(body, geom.R_act);
  const double rel_tol = 0.05;

  // highest pressure first; the first verified design wins
  for (auto it = catalog.pressures.rbegin(); it != catalog.pressures.rend(); ++it) {
    double P = *it;
    if (P <= 0) continue;
    std::vector<std::pair<std::array<double, 3>, SpamRegime>> candidates;
    if (auto u = detail::synth_unsaturated(geom, P, eps_target, F_target, seed,
                                           catalog.l_min, catalog.l_max))
      candidates.push_back({*u, SpamRegime::kUnsaturated});
    if (auto s = detail::synth_saturated(geom, P, eps_target, F_target, catalog.l_min,
                                         catalog.l_max))
      candidates.push_back({*s, SpamRegime::kSaturated});

    SynthesisResult best;
    double best_err = 1e300;
    for (auto& [cand, regime] : candidates) {
      double l0_snapped = catalog.snap_length(cand[2]);
      SpamGeometry g = geom;
      g.l_0 = l0_snapped;
      double th;
      try {
        th = free_space_equilibrium(body, g, P);
      } catch (const std::exception&) {
        continue;
      }
      double err = std::fabs(th - theta_curv) / theta_curv;
      if (err <= rel_tol && err < best_err) {
        best_err = err;
        best.P_act = P;
        best.l_0 = l0_snapped;
        best.m = cand[0];
        best.phi_Rc = cand[1];
        best.achieved_theta = th;
        best.regime = regime;
      }
    }
    if (best_err < 1e300) return best;
  }

  auto bounds = curvature_bounds(catalog, body, geom);
  throw InfeasibleError("synthesize: no catalog design achieves theta_curv = " +
                        std::to_string(theta_curv) + " within 5% (feasible range [" +
                        std::to_string(bounds[0]) + ", " + std::to_string(bounds[1]) + "])");
}

}  // namespace vinesim
