#include <catch2/catch_amalgamated.hpp>

#include "vinesim/perturb.hpp"
#include "vinesim/scene.hpp"

using namespace vinesim;

namespace {

// brute-force signed distance: dense boundary sampling + inside test
double sdf_bruteforce(const Obstacle& ob, Vec2 p, int samples = 200000) {
  if (auto* c = std::get_if<Circle>(&ob.shape)) {
    double best = 1e300;
    for (int i = 0; i < samples; ++i) {
      double a = 2.0 * kPi * i / samples;
      Vec2 q{c->center.x + c->radius * std::cos(a), c->center.y + c->radius * std::sin(a)};
      best = std::min(best, (p - q).norm());
    }
    bool inside = (p - c->center).norm() < c->radius;
    return inside ? -best : best;
  }
  const auto& poly = std::get<ConvexPolygon>(ob.shape).vertices;
  size_t n = poly.size();
  double per = 0;
  for (size_t i = 0; i < n; ++i) per += (poly[(i + 1) % n] - poly[i]).norm();
  double best = 1e300;
  bool inside = true;
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    int k = std::max(2, int(samples * (b - a).norm() / per));
    for (int j = 0; j <= k; ++j) {
      Vec2 q = a + (b - a) * (double(j) / k);
      best = std::min(best, (p - q).norm());
    }
    if ((b - a).cross(p - a) < 0) inside = false;
  }
  return inside ? -best : best;
}

}  // namespace

TEST_CASE("sdf matches the brute-force oracle") {
  Obstacle circle{Circle{{0.4, -0.2}, 0.35}};
  Obstacle tri{ConvexPolygon{{{0, 0}, {1, 0.1}, {0.3, 0.9}}}};
  Obstacle box{ConvexPolygon{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}};

  Rng rng(99);
  for (int i = 0; i < 60; ++i) {
    Vec2 p{rng.uniform(-1.6, 1.6), rng.uniform(-1.6, 1.6)};
    CHECK(circle.sdf(p) == Catch::Approx(sdf_bruteforce(circle, p)).margin(1e-9));
    CHECK(tri.sdf(p) == Catch::Approx(sdf_bruteforce(tri, p)).margin(1e-6));
    CHECK(box.sdf(p) == Catch::Approx(sdf_bruteforce(box, p)).margin(1e-6));
  }
}

TEST_CASE("sdf gradient is the outward direction") {
  Obstacle tri{ConvexPolygon{{{0, 0}, {1, 0.1}, {0.3, 0.9}}}};
  Obstacle circle{Circle{{0.4, -0.2}, 0.35}};
  Rng rng(7);
  for (auto& ob : {tri, circle}) {
    for (int i = 0; i < 40; ++i) {
      Vec2 p{rng.uniform(-1.0, 1.5), rng.uniform(-1.0, 1.5)};
      Vec2 g = ob.sdf_gradient(p);
      CHECK(g.norm() == Catch::Approx(1.0).margin(1e-9));
      double h = 1e-7;
      double dnum_x = (ob.sdf({p.x + h, p.y}) - ob.sdf({p.x - h, p.y})) / (2 * h);
      double dnum_y = (ob.sdf({p.x, p.y + h}) - ob.sdf({p.x, p.y - h})) / (2 * h);
      // skip points near the medial axis where the gradient jumps
      if (std::fabs(std::fabs(dnum_x * dnum_x + dnum_y * dnum_y) - 1.0) > 1e-4) continue;
      CHECK(g.x == Catch::Approx(dnum_x).margin(1e-5));
      CHECK(g.y == Catch::Approx(dnum_y).margin(1e-5));
    }
  }
}

TEST_CASE("all six environments construct and validate") {
  for (auto& name : env_names()) {
    Scene sc = make_env(name);
    CHECK(sc.obstacles.size() > 0);
    CHECK_NOTHROW(sc.validate());
    CHECK(sc.name == name);
  }
  CHECK_THROWS_AS(make_env("bogus"), DomainError);
}

TEST_CASE("tube has a clear straight channel") {
  Scene sc = make_env("tube");
  // no obstacle blocks the straight ray from the start for the channel length
  Vec2 dir = sc.start.direction();
  for (int i = 0; i <= 100; ++i) {
    Vec2 p = sc.start.position() + dir * (i * 0.01 * (sc.bounds.hi.y - sc.start.y));
    if (!sc.bounds.contains(p)) break;
    CHECK(sc.sdf(p) > 0.0);
  }
}

TEST_CASE("pickone has congruent corridors with one route to the goal") {
  Scene sc = make_env("pickone");
  // four corridor entrances are obstacle-free at the corridor mid-height
  double s = sc.bounds.hi.x;
  double mid_y = 0.5 * s;
  int open_above = 0;
  std::vector<double> corridor_x = {0.2175, 0.4025, 0.5975, 0.7825};
  for (double cx : corridor_x) {
    CHECK(sc.sdf({cx * s, mid_y}) > 0.0);
    // probe just above the cap height
    bool open = true;
    for (double y = 0.66; y <= 0.73; y += 0.005) {
      if (sc.sdf({cx * s, y * s}) <= 0.0) open = false;
    }
    open_above += open ? 1 : 0;
  }
  CHECK(open_above == 1);
}

TEST_CASE("goal test uses the closed disc") {
  Scene sc = make_env("tube");
  CHECK(goal_reached(sc.goal.center, sc));
  Vec2 boundary = sc.goal.center + Vec2{sc.goal.radius, 0};
  CHECK(goal_reached(boundary, sc));
  CHECK_FALSE(goal_reached(sc.goal.center + Vec2{sc.goal.radius * 1.001, 0}, sc));
  CHECK_FALSE(goal_reached({sc.bounds.hi.x + 1.0, sc.goal.center.y}, sc));
}

TEST_CASE("scene serialization round-trips exactly") {
  for (auto& name : env_names()) {
    Scene sc = make_env(name, 1.7);
    std::string text = print_scene(sc);
    Scene back = parse_scene(text);
    CHECK(print_scene(back) == text);
    REQUIRE(back.obstacles.size() == sc.obstacles.size());
    CHECK(back.start.x == sc.start.x);
    CHECK(back.goal.center.y == sc.goal.center.y);
  }
}

TEST_CASE("scene parser reports line numbers on malformed input") {
  std::string bad = "vinesim-scene v1\nunits m\nbounds 0 0 1\n";
  try {
    parse_scene(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scene("not-a-scene\n"), ParseError);
  // mm units scale into meters
  std::string mm_scene =
      "vinesim-scene v1\nunits mm\nbounds 0 0 2000 2000\nstart 1000 100 1.5707963267948966\n"
      "goal 1000 1800 100\ncircle 500 500 80\n";
  Scene sc = parse_scene(mm_scene);
  CHECK(sc.bounds.hi.x == Catch::Approx(2.0));
  CHECK(sc.goal.radius == Catch::Approx(0.1));
}

TEST_CASE("zero perturbation is the identity") {
  Scene sc = make_env("plus");
  ActuatorDesign d;
  d.sections.push_back({0.05, 3, 0.03, psi_to_pa(1.5), 1});
  Perturbation p;
  p.seed = 42;
  auto out = perturb(sc, d, p);
  CHECK(print_scene(out.scene) == print_scene(sc));
  CHECK(out.design.sections[0].P_act == d.sections[0].P_act);
  CHECK(out.design.sections[0].l_0 == d.sections[0].l_0);
  CHECK(out.resampled_draws == 0);
}

TEST_CASE("perturbation is deterministic and preserves counts") {
  Scene sc = make_env("maze");
  ActuatorDesign d;
  d.sections.push_back({0.05, 3, 0.03, psi_to_pa(1.5), 1});
  d.sections.push_back({0.30, 2, 0.04, psi_to_pa(2.0), -1});
  Perturbation p{0.01, 0.05, 0.03, 0.03, 777};
  auto a = perturb(sc, d, p);
  auto b = perturb(sc, d, p);
  CHECK(print_scene(a.scene) == print_scene(b.scene));
  CHECK(a.design.sections[1].P_act == b.design.sections[1].P_act);
  CHECK(a.scene.obstacles.size() == sc.obstacles.size());
  CHECK(a.design.sections.size() == d.sections.size());
}

TEST_CASE("perturbation displacement statistics match sigma_pos") {
  Scene sc;
  sc.name = "stat";
  sc.bounds = {{-10, -10}, {10, 10}};
  sc.start = {-9, -9, 0};
  sc.goal = {{9, 9}, 0.5};
  sc.obstacles.push_back(Obstacle{Circle{{2, 1}, 0.3}});
  sc.validate();
  ActuatorDesign d;

  const double sigma = 0.02;
  const int n = 10000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    Perturbation p{sigma, 0, 0, 0, uint64_t(i + 1)};
    auto out = perturb(sc, d, p);
    double dx = std::get<Circle>(out.scene.obstacles[0].shape).center.x - 2.0;
    sum += dx;
    sum2 += dx * dx;
  }
  double var = sum2 / n - (sum / n) * (sum / n);
  CHECK(std::sqrt(var) == Catch::Approx(sigma).epsilon(0.05));
}
