#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vinesim/beam.hpp"
#include "vinesim/common.hpp"
#include "vinesim/design.hpp"
#include "vinesim/parallel.hpp"
#include "vinesim/scene.hpp"
#include "vinesim/surrogate.hpp"

namespace vinesim {

/// Position-based forward simulation of a growing, actuated, contacting
/// vine. The state is minimal-coordinate: a fixed base pose, signed relative
/// joint angles, and the length of the growing distal segment. Each step
/// advances the growth target and descends the weighted cost
///   w_a * sum_i |M_tot,i| + w_b * growth(l_last) + w_c * contact
/// over (thetas, l_last). No velocity or inertial state exists anywhere.

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VineState {
  Pose2 base;
  std::vector<double> thetas;  // signed; joint j sits at arc (j+1) * l_seg
  double l_last = 0.0125;      // (0, l_seg]

  double grown_length(double l_seg) const { return thetas.size() * l_seg + l_last; }
  int segment_count() const { return int(thetas.size()) + 1; }

  void validate(double l_seg) const {
    for (double t : thetas)
      if (!(std::fabs(t) <= kPi / 2 + 1e-12)) throw DomainError("vine state: |theta| > pi/2");
    if (!(l_last > 0 && l_last <= l_seg + 1e-12))
      throw DomainError("vine state: l_last outside (0, l_seg]");
  }
};

inline VineState initial_state(const Pose2& base, double l_seg) {
  VineState st;
  st.base = base;
  st.l_last = 0.5 * l_seg;
  return st;
}

struct SimParams {
  double w_a = 160.0;  // moment weight
  double w_b = 15.0;   // growth weight
  double w_c = 1.0;    // contact weight
  int n_steps = 50;    // descent steps per sim step
  double alpha = 0.01; // descent step size
  double growth_rate = 0.02;  // [m/s]
  double dt = 0.1;            // [s]
  // scaling and safeguards (the cost terms are dimensionless)
  double contact_scale = 0.002;  // [m] penetration that contributes 1 to the term
  int contact_samples = 5;       // sample points per segment
  double theta_clip = 0.05;      // per-step trust radius [rad]
  double l_clip = 0.002;         // per-step trust radius [m]

  void validate() const {
    if (!(w_a > 0 && w_b > 0 && w_c > 0)) throw DomainError("sim params: weights must be > 0");
    if (n_steps < 1) throw DomainError("sim params: n_steps >= 1");
    if (!(alpha > 0)) throw DomainError("sim params: alpha > 0");
    if (!(growth_rate > 0 && dt > 0)) throw DomainError("sim params: growth_rate, dt > 0");
  }
};

struct FkResult {
  std::vector<Vec2> points;      // segment endpoints, size = segments + 1
  std::vector<double> headings;  // per segment, size = segments
};

/// Chain kinematics: segment 0 leaves the base along its heading; joint j
/// rotates segment j+1 relative to segment j. The tip segment has length
/// l_last, all others l_seg.
inline FkResult forward_kinematics(const VineState& st, double l_seg) {
  FkResult fk;
  int nseg = st.segment_count();
  fk.points.reserve(nseg + 1);
  fk.headings.reserve(nseg);
  Vec2 p = st.base.position();
  double h = st.base.heading;
  fk.points.push_back(p);
  for (int i = 0; i < nseg; ++i) {
    if (i > 0) h += st.thetas[i - 1];
    double len = (i == nseg - 1) ? st.l_last : l_seg;
    p = p + Vec2{std::cos(h), std::sin(h)} * len;
    fk.points.push_back(p);
    fk.headings.push_back(h);
  }
  return fk;
}

inline Vec2 tip_position(const VineState& st, double l_seg) {
  return forward_kinematics(st, l_seg).points.back();
}

inline Pose2 tip_pose(const VineState& st, double l_seg) {
  FkResult fk = forward_kinematics(st, l_seg);
  return {fk.points.back().x, fk.points.back().y, fk.headings.back()};
}

namespace detail {

/// d(restoring_moment)/d theta for theta >= 0 (see beam.hpp for the regimes)
inline double restoring_moment_slope(const VineBodyParams& body, double theta) {
  double cap = body.moment_scale();
  double s2 = std::sin(0.5 * theta);
  double c2 = std::cos(0.5 * theta);
  if (s2 < body.eps_critical) return cap * c2 / (4.0 * body.eps_critical);
  double u = 2.0 * body.eps_critical / s2 - 1.0;
  double gamma = std::acos(u);
  // onset neighborhood: the gamma chain is 0/0; use its finite limit
  if (gamma < 1e-3) return cap * body.eps_critical * c2 / (2.0 * s2 * s2);
  double dfactor;
  double d = kPi - gamma;
  if (d < 0.01) {
    dfactor = d / 5.0;  // series of the moment factor near gamma -> pi
  } else {
    double N = std::sin(2 * gamma) + 2 * kPi - 2 * gamma;
    double D = 4.0 * (std::sin(gamma) + (kPi - gamma) * std::cos(gamma));
    double Np = 2 * std::cos(2 * gamma) - 2;
    double Dp = -4.0 * (kPi - gamma) * std::sin(gamma);
    dfactor = (Np * D - N * Dp) / (D * D);
  }
  double dgamma_dtheta =
      body.eps_critical * c2 / (s2 * s2 * std::sqrt(std::max(1e-300, 1.0 - u * u)));
  return cap * dfactor * dgamma_dtheta;
}

}  // namespace detail

/// Everything a rollout needs, bundled once; buffers are reused across cost
/// evaluations, so one Simulator instance serves one thread.
class Simulator {
 public:
  Simulator(const Scene& scene, const ActuatorDesign& design, const SimParams& params,
            const VineBodyParams& body, const SurrogateModel& model)
      : scene_(&scene), design_(&design), params_(params), body_(body), model_(&model) {
    params_.validate();
    body_.validate();
    design.validate();
    arm_ = actuation_arm(body_, model.geom.R_act);
    moment_ref_ = body_.moment_scale();
    obstacle_boxes_.resize(scene.obstacles.size());
    for (size_t i = 0; i < scene.obstacles.size(); ++i)
      scene.obstacles[i].aabb(obstacle_boxes_[i].first, obstacle_boxes_[i].second);
  }

  const SimParams& params() const { return params_; }
  const VineBodyParams& body() const { return body_; }

  /// cost and its gradient w.r.t. (thetas..., l_last)
  double cost(const VineState& st, double l_target, std::vector<double>* grad = nullptr) const {
    int n = int(st.thetas.size());
    if (grad) {
      grad->assign(n + 1, 0.0);
    }
    double total = 0.0;

    // --- moment term: sum_i |M_tot,i| / (pi P_vine R_vine^3)
    for (int j = 0; j < n; ++j) {
      double theta = st.thetas[j];
      double arc = (j + 1) * body_.l_seg;
      const ActuatorSection* sec = design_->section_at(arc);
      double m_net, dm_net;  // signed net moment and d/dtheta
      double sign_t = theta > 0 ? 1.0 : (theta < 0 ? -1.0 : 0.0);
      double m_res = restoring_moment(body_, std::fabs(theta));
      double m_res_slope = detail::restoring_moment_slope(body_, std::fabs(theta));
      if (sec && sec->P_act > 0) {
        double s = double(sec->side);
        double eps = arm_ * (s * theta) / body_.l_seg;
        double F, dF_deps;
        model_->force_and_slope(sec->P_act, eps, sec->l_0, F, dF_deps);
        m_net = s * F * arm_ - sign_t * m_res;
        // d/dtheta of -sign(theta) M(|theta|) is -M'(|theta|) for either sign
        dm_net = dF_deps * arm_ * arm_ / body_.l_seg - m_res_slope;
      } else {
        m_net = -sign_t * m_res;
        dm_net = -m_res_slope;
      }
      // |M_tot| with a smoothing radius: the kink at the moment balance
      // stalls plain subgradient descent (the minimum is still M_tot = 0
      // exactly, since dM_tot/dtheta < 0 strictly)
      double delta = 0.02 * moment_ref_;
      double root = std::sqrt(m_net * m_net + delta * delta);
      total += params_.w_a * (root - delta) / moment_ref_;
      if (grad) (*grad)[j] += params_.w_a * (m_net / root) * dm_net / moment_ref_;
    }

    // --- growth term: ((l_last - l_target)/l_seg)^2
    {
      double gap = (st.l_last - l_target) / body_.l_seg;
      total += params_.w_b * gap * gap;
      if (grad) (*grad)[n] += params_.w_b * 2.0 * gap / body_.l_seg;
    }

    // --- contact term: capsule points vs obstacle signed distances
    if (!scene_->obstacles.empty()) {
      FkResult fk = forward_kinematics(st, body_.l_seg);
      int nseg = st.segment_count();
      double inv_dc2 = 1.0 / (params_.contact_scale * params_.contact_scale);
      contact_hits_.clear();
      for (int i = 0; i < nseg; ++i) {
        Vec2 a = fk.points[i], b = fk.points[i + 1];
        for (int k = 0; k < params_.contact_samples; ++k) {
          double t = params_.contact_samples == 1
                         ? 0.5
                         : double(k) / double(params_.contact_samples - 1);
          Vec2 q = a + (b - a) * t;
          for (size_t oi = 0; oi < scene_->obstacles.size(); ++oi) {
            const auto& box = obstacle_boxes_[oi];
            double margin = body_.R_vine + 2e-3;
            if (q.x < box.first.x - margin || q.x > box.second.x + margin ||
                q.y < box.first.y - margin || q.y > box.second.y + margin)
              continue;
            double d = scene_->obstacles[oi].sdf(q);
            double pen = body_.R_vine - d;
            if (pen <= 0) continue;
            total += params_.w_c * pen * pen * inv_dc2;
            if (grad) {
              Vec2 gdir = scene_->obstacles[oi].sdf_gradient(q);
              // dcost/dq = -2 w_c pen / dc^2 * grad_sdf
              Vec2 dq = gdir * (-2.0 * params_.w_c * pen * inv_dc2);
              contact_hits_.push_back({q, dq, i, t});
            }
          }
        }
      }
      if (grad && !contact_hits_.empty()) {
        for (const auto& hit : contact_hits_) {
          // joints before the point rotate it about their pivot
          for (int j = 0; j < n; ++j) {
            if (j + 1 > hit.segment) break;  // joint j pivots segments j+1..
            Vec2 pivot = fk.points[j + 1];
            Vec2 r = hit.point - pivot;
            (*grad)[j] += hit.dcost_dq.dot(r.perp());
          }
          if (hit.segment == nseg - 1) {
            // the point rides the growing segment
            Vec2 dir{std::cos(fk.headings[nseg - 1]), std::sin(fk.headings[nseg - 1])};
            (*grad)[n] += hit.dcost_dq.dot(dir) * hit.t;
          }
        }
      }
    }
    return total;
  }

  /// one PBD step: advance the growth target, run n_steps safeguarded
  /// descent updates (joint angles and growth length as separate blocks, so
  /// a converged block cannot stall the other), spawn a joint when the tip
  /// segment over-grows
  VineState step(const VineState& st) const {
    VineState cur = st;
    double l_target = cur.l_last + params_.growth_rate * params_.dt;
    std::vector<double> grad;
    double c = cost(cur, l_target, &grad);
    for (int it = 0; it < params_.n_steps; ++it) {
      int n = int(cur.thetas.size());
      bool any_accepted = false;

      // theta block: -alpha * grad, trust-clamped, halved until it descends
      if (n > 0) {
        double scale = 1.0;
        for (int halving = 0; halving < 12; ++halving, scale *= 0.5) {
          trial_ = cur;
          for (int j = 0; j < n; ++j) {
            double d = clamp(-params_.alpha * grad[j], -params_.theta_clip, params_.theta_clip);
            trial_.thetas[j] = clamp(cur.thetas[j] + scale * d, -kPi / 2, kPi / 2);
          }
          double c_new = cost(trial_, l_target, nullptr);
          if (c_new < c) {
            cur.thetas.swap(trial_.thetas);
            c = c_new;
            any_accepted = true;
            break;
          }
        }
      }

      // growth-length block
      {
        double scale = 1.0;
        for (int halving = 0; halving < 12; ++halving, scale *= 0.5) {
          trial_ = cur;
          double dl = clamp(-params_.alpha * grad[n], -params_.l_clip, params_.l_clip);
          trial_.l_last = clamp(cur.l_last + scale * dl, 1e-4, 1.5 * body_.l_seg);
          if (trial_.l_last == cur.l_last) break;
          double c_new = cost(trial_, l_target, nullptr);
          if (c_new < c) {
            cur.l_last = trial_.l_last;
            c = c_new;
            any_accepted = true;
            break;
          }
        }
      }

      if (!any_accepted) break;  // settled at the trust radius
      c = cost(cur, l_target, &grad);
    }
    for (double t : cur.thetas)
      if (!std::isfinite(t)) throw NumericError("simulator: non-finite joint angle");
    if (!std::isfinite(cur.l_last)) throw NumericError("simulator: non-finite l_last");
    while (cur.l_last > body_.l_seg) {
      cur.thetas.push_back(0.0);
      cur.l_last -= body_.l_seg;
    }
    return cur;
  }

  /// max capsule penetration of the state into the scene [m]
  double max_penetration(const VineState& st) const {
    FkResult fk = forward_kinematics(st, body_.l_seg);
    double worst = 0;
    for (size_t i = 0; i + 1 < fk.points.size(); ++i) {
      for (int k = 0; k < params_.contact_samples; ++k) {
        double t = double(k) / std::max(1, params_.contact_samples - 1);
        Vec2 q = fk.points[i] + (fk.points[i + 1] - fk.points[i]) * t;
        double d = scene_->sdf(q);
        worst = std::max(worst, body_.R_vine - d);
      }
    }
    return worst;
  }

 private:
  struct ContactHit {
    Vec2 point;
    Vec2 dcost_dq;
    int segment;
    double t;
  };

  const Scene* scene_;
  const ActuatorDesign* design_;
  SimParams params_;
  VineBodyParams body_;
  const SurrogateModel* model_;
  double arm_ = 0;
  double moment_ref_ = 1;
  std::vector<std::pair<Vec2, Vec2>> obstacle_boxes_;
  mutable std::vector<ContactHit> contact_hits_;
  mutable VineState trial_;
};

// ---------------------------------------------------------------------------
// rollouts

struct Trajectory {
  std::vector<VineState> states;  // includes the initial state
  std::vector<double> times;
  std::optional<std::string> error;  // per-element failure, siblings unaffected

  const VineState& final_state() const { return states.back(); }
};

inline Trajectory rollout(const Scene& scene, const ActuatorDesign& design,
                          const SimParams& params, const VineBodyParams& body,
                          const SurrogateModel& model, const VineState& initial,
                          double duration) {
  Simulator sim(scene, design, params, body, model);
  Trajectory traj;
  traj.states.push_back(initial);
  traj.times.push_back(0.0);
  int n_steps = int(std::llround(duration / params.dt));
  try {
    VineState cur = initial;
    for (int i = 0; i < n_steps; ++i) {
      cur = sim.step(cur);
      traj.states.push_back(cur);
      traj.times.push_back((i + 1) * params.dt);
    }
  } catch (const std::exception& e) {
    traj.error = e.what();
  }
  return traj;
}

/// Element-wise independent batch rollouts. Output is identical to running
/// the elements sequentially; execution may fan out across threads.
inline std::vector<Trajectory> rollout_batch(const std::vector<VineState>& initials,
                                             const std::vector<const Scene*>& scenes,
                                             const std::vector<const ActuatorDesign*>& designs,
                                             const std::vector<double>& durations,
                                             const SimParams& params, const VineBodyParams& body,
                                             const SurrogateModel& model,
                                             unsigned threads = 0) {
  size_t n = initials.size();
  if (scenes.size() != n || designs.size() != n || durations.size() != n)
    throw DomainError("rollout_batch: list lengths differ");
  std::vector<Trajectory> out(n);
  parallel_for(n, [&](size_t i) {
    out[i] = rollout(*scenes[i], *designs[i], params, body, model, initials[i], durations[i]);
  }, threads);
  return out;
}

// ---------------------------------------------------------------------------
// trajectory file format (structured text)

inline std::string print_trajectory(const Trajectory& traj) {
  std::ostringstream os;
  os << "vinesim-trajectory v1\n";
  os << "units m\n";
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& st = traj.states[i];
    os << "state " << detail::fmt_g17(traj.times[i]) << " " << detail::fmt_g17(st.base.x)
       << " " << detail::fmt_g17(st.base.y) << " " << detail::fmt_g17(st.base.heading)
       << " " << detail::fmt_g17(st.l_last);
    for (double t : st.thetas) os << " " << detail::fmt_g17(t);
    os << "\n";
  }
  if (traj.error) os << "error " << *traj.error << "\n";
  return os.str();
}

inline Trajectory parse_trajectory(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  Trajectory traj;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (!have_header) {
      if (tag != "vinesim-trajectory")
        throw ParseError("trajectory parse error at line " + std::to_string(lineno));
      have_header = true;
      std::string ver;
      ls >> ver;
      continue;
    }
    if (tag == "units") {
      continue;
    } else if (tag == "state") {
      double t;
      VineState st;
      if (!(ls >> t >> st.base.x >> st.base.y >> st.base.heading >> st.l_last))
        throw ParseError("trajectory parse error at line " + std::to_string(lineno));
      double v;
      while (ls >> v) st.thetas.push_back(v);
      traj.states.push_back(std::move(st));
      traj.times.push_back(t);
    } else if (tag == "error") {
      std::string rest;
      std::getline(ls, rest);
      traj.error = rest;
    } else {
      throw ParseError("trajectory parse error at line " + std::to_string(lineno) +
                       ": unknown tag '" + tag + "'");
    }
  }
  if (traj.states.empty()) throw ParseError("trajectory file has no states");
  return traj;
}

}  // namespace vinesim
