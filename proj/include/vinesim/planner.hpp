#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vinesim/biarc.hpp"
#include "vinesim/common.hpp"
#include "vinesim/design.hpp"
#include "vinesim/scene.hpp"
#include "vinesim/simulator.hpp"
#include "vinesim/synthesis.hpp"

namespace vinesim {

/// Design optimization as sampling-based kinodynamic planning: SST* over
/// actuator designs. Tree nodes are parameterized by the vine tip pose;
/// propagation samples a control (extend straight, or start a new actuated
/// section drawn from the discrete catalog) and a duration, then rolls the
/// batch through the simulator. Node cost is the number of curved sections
/// plus normalized arc length. A goal-rooted geometric biarc tree optionally
/// supplies cost-to-go estimates.

struct PlannerParams {
  // the witness radius must stay below the typical edge displacement
  // (growth_rate * duration), otherwise children land inside their parent's
  // witness cell and never survive (cost grows with length)
  double delta_bn_frac = 0.06;   // selection radius, fraction of the diagonal
  double delta_s_frac = 0.02;    // witness radius, fraction of the diagonal
  double goal_bias = 0.10;
  int iteration_budget = 1000000;  // batched iterations
  double time_budget = 60.0;       // [s]
  double epsilon = 0.5;            // near-optimality slack (radius shrink driver)
  bool heuristic_enabled = true;
  double reverse_budget = 2.0;     // [s] reverse-tree construction budget
  int batch = 64;                  // propagations per iteration
  double p_straight = 0.7;
  double dur_min = 2.0, dur_max = 8.0;  // [s] edge durations
  unsigned threads = 0;
  double max_vine_length = 0.0;  // 0: 2x workspace diagonal

  void validate() const {
    if (!(delta_s_frac < delta_bn_frac))
      throw DomainError("planner: witness radius must be below selection radius");
    if (!(goal_bias >= 0 && goal_bias <= 1)) throw DomainError("planner: bad goal bias");
    if (batch < 1 || iteration_budget < 1) throw DomainError("planner: bad budgets");
  }
};

struct PlanStats {
  double solve_time = -1;     // time to first solution [s]
  double best_cost = -1;
  double iter_time = 0;       // mean batched-iteration time [s]
  int iterations = 0;
  int nodes = 0;
  int solutions_found = 0;
  double total_time = 0;
};

struct PlanResult {
  bool success = false;
  ActuatorDesign design;
  double duration = 0;  // total rollout duration of the solution [s]
  Trajectory trajectory;
  PlanStats stats;
};

// ---------------------------------------------------------------------------
// reverse geometric tree (RRT* with biarc edges, rooted at the goal)

struct ReverseNode {
  Pose2 pose;
  int parent = -1;      // -1: the goal root
  double cost_to_go = 0;  // segments + length / L_ref along the tree path
};

class ReverseTree {
 public:
  std::vector<ReverseNode> nodes;
  double l_ref = 1;

  bool empty() const { return nodes.empty(); }

  /// cost-to-go of the nearest node within `radius` of the pose (position
  /// metric with heading weighted by `heading_scale`)
  std::optional<double> nearest_cost_to_go(const Pose2& tip, double radius,
                                           double heading_scale) const {
    double best = 1e300;
    double best_ctg = 0;
    for (const auto& n : nodes) {
      double dx = n.pose.x - tip.x, dy = n.pose.y - tip.y;
      double dh = wrap_angle(n.pose.heading - tip.heading) * heading_scale;
      double d = std::sqrt(dx * dx + dy * dy + dh * dh);
      if (d < best) {
        best = d;
        best_ctg = n.cost_to_go;
      }
    }
    if (best > radius) return std::nullopt;
    return best_ctg;
  }
};

namespace detail {

inline bool arc_curvature_valid(const Arc& arc, double kappa_min, double kappa_max) {
  double k = std::fabs(arc.curvature);
  if (k <= 1e-6) return true;  // straight
  return k >= kappa_min && k <= kappa_max;
}

inline bool arc_collision_free(const Arc& arc, const Scene& scene, double clearance) {
  int n = std::max(2, int(arc.length / (0.5 * clearance)) + 1);
  for (int i = 0; i <= n; ++i) {
    Pose2 p = arc.pose_at(arc.length * i / n);
    if (!scene.bounds.contains(p.position())) return false;
    if (scene.sdf(p.position()) < clearance) return false;
  }
  return true;
}

inline int arc_segment_count(const Arc& arc) {
  return std::fabs(arc.curvature) > 1e-6 ? 1 : 0;
}

}  // namespace detail

/// Goal-rooted RRT* over robot poses with biarc edges whose curvatures stay
/// inside the feasible per-segment range. Edge cost = curved-arc count +
/// length / l_ref. Throws InfeasibleError if nothing connects to the goal
/// within the budget.
inline ReverseTree build_reverse_tree(const Scene& scene, std::array<double, 2> theta_bounds,
                                      double l_seg, double R_vine, double budget_seconds,
                                      uint64_t seed, double l_ref = 0) {
  ReverseTree tree;
  tree.l_ref = l_ref > 0 ? l_ref : scene.bounds.diagonal();
  double kappa_min = theta_bounds[0] / l_seg;
  double kappa_max = theta_bounds[1] / l_seg;
  double clearance = R_vine;
  Rng rng(seed ^ 0x7ee5eedULL);
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const double r_neighbor = 0.20 * scene.bounds.diagonal();
  auto pose_dist = [&](const Pose2& a, const Pose2& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    double dh = wrap_angle(a.heading - b.heading) * R_vine;
    return std::sqrt(dx * dx + dy * dy + dh * dh);
  };

  // a node's edge goes from its pose toward the goal: the first hop is a
  // single arc that hits the goal disc center (arrival heading free)
  auto try_root_edge = [&](const Pose2& pose) -> std::optional<double> {
    auto arc = arc_to_point(pose, scene.goal.center);
    if (!arc) return std::nullopt;
    if (!detail::arc_curvature_valid(*arc, kappa_min, kappa_max)) return std::nullopt;
    if (!detail::arc_collision_free(*arc, scene, clearance)) return std::nullopt;
    return detail::arc_segment_count(*arc) + arc->length / tree.l_ref;
  };
  auto try_edge = [&](const Pose2& from, const Pose2& to) -> std::optional<double> {
    auto biarc = biarc_fit(from, to);
    if (!biarc) return std::nullopt;
    if (!detail::arc_curvature_valid(biarc->first, kappa_min, kappa_max) ||
        !detail::arc_curvature_valid(biarc->second, kappa_min, kappa_max))
      return std::nullopt;
    if (!detail::arc_collision_free(biarc->first, scene, clearance) ||
        !detail::arc_collision_free(biarc->second, scene, clearance))
      return std::nullopt;
    return detail::arc_segment_count(biarc->first) + detail::arc_segment_count(biarc->second) +
           biarc->length() / tree.l_ref;
  };

  int iterations = 0;
  while (elapsed() < budget_seconds && iterations < 200000) {
    ++iterations;
    Pose2 sample{rng.uniform(scene.bounds.lo.x, scene.bounds.hi.x),
                 rng.uniform(scene.bounds.lo.y, scene.bounds.hi.y),
                 rng.uniform(-kPi, kPi)};
    if (scene.sdf(sample.position()) < clearance) continue;

    // best parent: the goal root or a near node
    double best_cost = 1e300;
    int best_parent = -2;
    if (auto c = try_root_edge(sample)) {
      best_cost = *c;
      best_parent = -1;
    }
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      if (pose_dist(sample, tree.nodes[i].pose) > r_neighbor) continue;
      if (auto c = try_edge(sample, tree.nodes[i].pose)) {
        double total = *c + tree.nodes[i].cost_to_go;
        if (total < best_cost) {
          best_cost = total;
          best_parent = int(i);
        }
      }
    }
    if (best_parent == -2) continue;
    tree.nodes.push_back({sample, best_parent, best_cost});

    // rewire: the new node may shortcut near nodes' routes to the goal
    const auto& fresh = tree.nodes.back();
    for (size_t i = 0; i + 1 < tree.nodes.size(); ++i) {
      auto& other = tree.nodes[i];
      if (pose_dist(other.pose, fresh.pose) > r_neighbor) continue;
      if (auto c = try_edge(other.pose, fresh.pose)) {
        double total = *c + fresh.cost_to_go;
        if (total + 1e-12 < other.cost_to_go) {
          other.parent = int(tree.nodes.size()) - 1;
          other.cost_to_go = total;
        }
      }
    }
  }
  if (tree.nodes.empty())
    throw InfeasibleError("reverse tree: no collision-free biarc reaches the goal");
  return tree;
}

// ---------------------------------------------------------------------------
// SST* over designs

struct PlanNode {
  Pose2 tip;
  VineState vine;
  ActuatorDesign design;
  double cost_to_come = 0;
  double duration = 0;  // total sim time from the root
  int parent = -1;
  int children = 0;
  bool active = true;
  bool removed = false;
};

namespace detail {

struct Witness {
  Pose2 pose;
  int rep = -1;  // best-known node index
};

}  // namespace detail

inline double plan_cost(const ActuatorDesign& d, const VineState& st, double l_seg,
                        double l_ref) {
  return double(d.sections.size()) + st.grown_length(l_seg) / l_ref;
}

inline PlanResult plan(const Scene& scene, const DesignCatalog& catalog,
                       const VineBodyParams& body, const SurrogateModel& model,
                       const SimParams& sim_params, const PlannerParams& params,
                       uint64_t seed) {
  params.validate();
  catalog.validate();
  scene.validate();
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const double diag = scene.bounds.diagonal();
  const double l_ref = diag;
  const double max_len = params.max_vine_length > 0 ? params.max_vine_length : 2.0 * diag;
  const double heading_scale = body.R_vine;

  auto theta_bounds = curvature_bounds(catalog, body, model.geom);

  PlanResult result;
  ReverseTree rtree;
  if (params.heuristic_enabled) {
    try {
      rtree = build_reverse_tree(scene, theta_bounds, body.l_seg, body.R_vine,
                                 params.reverse_budget, seed, l_ref);
    } catch (const InfeasibleError&) {
      rtree = ReverseTree{};  // heuristic silently unavailable; plain SST* still runs
    }
  }

  auto heuristic = [&](const Pose2& tip) -> double {
    if (!params.heuristic_enabled) return 0.0;
    if (!rtree.empty()) {
      if (auto ctg = rtree.nearest_cost_to_go(tip, 0.10 * diag, heading_scale)) return *ctg;
    }
    // coverage fallback: optimistic straight-line estimate
    return (scene.goal.center - tip.position()).norm() / l_ref;
  };

  auto pose_dist = [&](const Pose2& a, const Pose2& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    double dh = wrap_angle(a.heading - b.heading) * heading_scale;
    return std::sqrt(dx * dx + dy * dy + dh * dh);
  };

  Rng rng(seed);
  std::vector<PlanNode> nodes;
  std::vector<detail::Witness> witnesses;

  {
    PlanNode root;
    root.vine = initial_state(scene.start, body.l_seg);
    root.tip = tip_pose(root.vine, body.l_seg);
    root.cost_to_come = plan_cost(root.design, root.vine, body.l_seg, l_ref);
    nodes.push_back(std::move(root));
    witnesses.push_back({nodes[0].tip, 0});
  }

  double delta_bn = params.delta_bn_frac * diag;
  double delta_s = params.delta_s_frac * diag;
  int epoch_len = 150;
  int epoch_left = epoch_len;

  int best_goal_node = -1;
  double best_cost = 1e300;
  PlanStats stats;

  auto prune_chain = [&](int idx) {
    // remove inactive childless nodes up the chain
    while (idx >= 0 && !nodes[idx].active && nodes[idx].children == 0 && !nodes[idx].removed &&
           idx != best_goal_node) {
      nodes[idx].removed = true;
      int p = nodes[idx].parent;
      if (p >= 0) --nodes[p].children;
      idx = p;
    }
  };

  struct Proposal {
    int from = -1;
    ActuatorDesign design;
    double duration = 0;
  };

  std::vector<Proposal> props(params.batch);
  std::vector<VineState> initials(params.batch);
  std::vector<const Scene*> scenes(params.batch, &scene);
  std::vector<const ActuatorDesign*> designs(params.batch);
  std::vector<double> durations(params.batch);

  while (stats.iterations < params.iteration_budget && elapsed() < params.time_budget) {
    ++stats.iterations;
    if (--epoch_left <= 0) {
      epoch_len *= 2;
      epoch_left = epoch_len;
      delta_bn = std::max(0.01 * diag, 0.5 * delta_bn);
      delta_s = std::max(0.004 * diag, 0.5 * delta_s);
    }

    // --- build a batch of propositions
    for (int b = 0; b < params.batch; ++b) {
      Pose2 target;
      if (rng.uniform() < params.goal_bias) {
        target = {scene.goal.center.x, scene.goal.center.y, rng.uniform(-kPi, kPi)};
      } else {
        target = {rng.uniform(scene.bounds.lo.x, scene.bounds.hi.x),
                  rng.uniform(scene.bounds.lo.y, scene.bounds.hi.y), rng.uniform(-kPi, kPi)};
      }
      // selection: lowest (cost + heuristic) active node within delta_bn,
      // else the nearest active node
      int sel = -1;
      double sel_score = 1e300;
      int nearest = -1;
      double nearest_d = 1e300;
      for (size_t i = 0; i < nodes.size(); ++i) {
        const auto& nd = nodes[i];
        if (!nd.active || nd.removed) continue;
        double d = pose_dist(nd.tip, target);
        if (d < nearest_d) {
          nearest_d = d;
          nearest = int(i);
        }
        if (d <= delta_bn) {
          double score = nd.cost_to_come + heuristic(nd.tip);
          if (score < sel_score) {
            sel_score = score;
            sel = int(i);
          }
        }
      }
      if (sel < 0) sel = nearest;
      auto& src = nodes[sel];

      Proposal& pr = props[b];
      pr.from = sel;
      pr.design = src.design;
      double dur = rng.uniform(params.dur_min, params.dur_max);
      bool straight = rng.uniform() < params.p_straight;
      if (!straight) {
        // new actuated section from the discrete catalog
        double P = catalog.pressures[rng.uniform_index(catalog.pressures.size())];
        double l0 = catalog.length_at(int(rng.uniform_index(catalog.length_steps())));
        int side = rng.uniform() < 0.5 ? 1 : -1;
        double grown = src.vine.grown_length(body.l_seg);
        double start = grown;
        if (!pr.design.sections.empty())
          start = std::max(start, pr.design.sections.back().arc_end());
        int n_units = std::max(1, int(std::llround(dur * sim_params.growth_rate / l0)));
        pr.design.sections.push_back({start, n_units, l0, P, side});
      }
      // durations snap to the simulation step grid
      pr.duration = std::max(sim_params.dt, std::round(dur / sim_params.dt) * sim_params.dt);
      initials[b] = src.vine;
      designs[b] = &pr.design;
      durations[b] = pr.duration;
    }

    auto t_roll0 = std::chrono::steady_clock::now();
    auto rollouts = rollout_batch(initials, scenes, designs, durations, sim_params, body,
                                  model, params.threads);
    stats.iter_time += std::chrono::duration<double>(std::chrono::steady_clock::now() - t_roll0)
                           .count();

    // --- insert results in batch order
    for (int b = 0; b < params.batch; ++b) {
      if (rollouts[b].error) continue;
      const VineState& final_st = rollouts[b].final_state();
      if (final_st.grown_length(body.l_seg) > max_len) continue;
      Pose2 tip = tip_pose(final_st, body.l_seg);
      if (!scene.bounds.contains(tip.position())) continue;
      double cost = plan_cost(props[b].design, final_st, body.l_seg, l_ref);

      // witness sparsification
      int w_idx = -1;
      double w_d = 1e300;
      for (size_t w = 0; w < witnesses.size(); ++w) {
        double d = pose_dist(witnesses[w].pose, tip);
        if (d < w_d) {
          w_d = d;
          w_idx = int(w);
        }
      }
      bool new_witness = w_d > delta_s;
      if (!new_witness) {
        int rep = witnesses[w_idx].rep;
        if (rep >= 0 && !nodes[rep].removed && nodes[rep].cost_to_come <= cost) continue;
      }

      PlanNode nd;
      nd.tip = tip;
      nd.vine = final_st;
      nd.design = props[b].design;
      nd.cost_to_come = cost;
      nd.duration = nodes[props[b].from].duration + props[b].duration;
      nd.parent = props[b].from;
      nodes.push_back(std::move(nd));
      int idx = int(nodes.size()) - 1;
      ++nodes[props[b].from].children;
      if (new_witness) {
        witnesses.push_back({tip, idx});
      } else {
        int old = witnesses[w_idx].rep;
        witnesses[w_idx].rep = idx;
        if (old >= 0 && !nodes[old].removed) {
          nodes[old].active = false;
          prune_chain(old);
        }
      }

      if (goal_reached(tip.position(), scene) && cost < best_cost) {
        best_cost = cost;
        best_goal_node = idx;
        ++stats.solutions_found;
        if (stats.solve_time < 0) stats.solve_time = elapsed();
      }
    }
  }

  stats.total_time = elapsed();
  if (stats.iterations > 0) stats.iter_time /= stats.iterations;
  stats.best_cost = best_goal_node >= 0 ? best_cost : -1;
  int live = 0;
  for (auto& n : nodes)
    if (!n.removed) ++live;
  stats.nodes = live;

  result.stats = stats;
  if (best_goal_node < 0) {
    result.success = false;
    return result;
  }
  result.success = true;
  result.design = nodes[best_goal_node].design;
  result.duration = nodes[best_goal_node].duration;
  // replay from scratch: must reproduce the stored final state and reach the
  // goal (piecewise edge rollouts are identical to one continuous rollout)
  result.trajectory = rollout(scene, result.design, sim_params, body, model,
                              initial_state(scene.start, body.l_seg), result.duration);
  return result;
}

// ---------------------------------------------------------------------------
// plan report (structured text, Table-1-style statistics)

inline std::string print_plan_report(const PlanResult& r, const std::string& env_name,
                                     uint64_t seed) {
  std::ostringstream os;
  os << "vinesim-plan-report v1\n";
  os << "env " << env_name << "\n";
  os << "seed " << seed << "\n";
  os << "success " << (r.success ? 1 : 0) << "\n";
  os << "solve_time " << detail::fmt_g17(r.stats.solve_time) << "\n";
  os << "best_cost " << detail::fmt_g17(r.stats.best_cost) << "\n";
  os << "iter_time " << detail::fmt_g17(r.stats.iter_time) << "\n";
  os << "iterations " << r.stats.iterations << "\n";
  os << "nodes " << r.stats.nodes << "\n";
  os << "solutions_found " << r.stats.solutions_found << "\n";
  os << "total_time " << detail::fmt_g17(r.stats.total_time) << "\n";
  os << "curved_sections " << r.design.sections.size() << "\n";
  os << "duration " << detail::fmt_g17(r.duration) << "\n";
  return os.str();
}

}  // namespace vinesim
