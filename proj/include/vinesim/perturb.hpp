#pragma once

#include <utility>

#include "vinesim/common.hpp"
#include "vinesim/design.hpp"
#include "vinesim/scene.hpp"

namespace vinesim {

/// Gaussian uncertainty model for robustness studies: obstacle positions
/// shift by sigma_pos [m], obstacle sizes scale by (1 + N(0, sigma_size)),
/// actuator pressures and unit lengths scale by (1 + N(0, sigma_P/l)).
struct Perturbation {
  double sigma_pos = 0;   // [m]
  double sigma_size = 0;  // relative
  double sigma_P = 0;     // relative
  double sigma_l = 0;     // relative
  uint64_t seed = 0;

  void validate() const {
    if (sigma_pos < 0 || sigma_size < 0 || sigma_P < 0 || sigma_l < 0)
      throw DomainError("perturbation: sigmas must be >= 0");
  }
};

struct PerturbResult {
  Scene scene;
  ActuatorDesign design;
  int resampled_draws = 0;  // rejected invalid draws (start swallowed, etc.)
};

/// Deterministic given p.seed. Invalid draws (an obstacle swallowing the
/// start pose, non-positive sizes) are rejected and resampled per obstacle,
/// at most 100 attempts each.
inline PerturbResult perturb(const Scene& scene, const ActuatorDesign& design,
                             const Perturbation& p) {
  p.validate();
  Rng rng(p.seed ^ 0x5eedf00dULL);
  PerturbResult out;
  out.scene = scene;
  out.design = design;
  out.scene.name = scene.name;

  for (size_t i = 0; i < scene.obstacles.size(); ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      Vec2 shift{rng.normal(0.0, p.sigma_pos), rng.normal(0.0, p.sigma_pos)};
      double scale = 1.0 + rng.normal(0.0, p.sigma_size);
      if (attempt > 0) ++out.resampled_draws;
      if (scale <= 0.05) continue;
      Obstacle ob = scene.obstacles[i];
      if (auto* c = std::get_if<Circle>(&ob.shape)) {
        c->center = c->center + shift;
        c->radius *= scale;
      } else {
        auto& poly = std::get<ConvexPolygon>(ob.shape);
        Vec2 centroid = poly.centroid();
        for (auto& v : poly.vertices) v = centroid + (v - centroid) * scale + shift;
      }
      if (ob.sdf(scene.start.position()) <= 0.0) continue;  // would swallow the start
      out.scene.obstacles[i] = ob;
      ok = true;
    }
    if (!ok)
      throw ConvergenceError("perturb: no valid draw for obstacle after 100 attempts");
  }

  for (auto& s : out.design.sections) {
    double fp = 1.0 + rng.normal(0.0, p.sigma_P);
    double fl = 1.0 + rng.normal(0.0, p.sigma_l);
    s.P_act = std::max(0.0, s.P_act * fp);
    s.l_0 = std::max(1e-4, s.l_0 * fl);
  }
  return out;
}

}  // namespace vinesim
