#include <catch2/catch_amalgamated.hpp>

#include "vinesim/spam.hpp"

using namespace vinesim;

namespace {
SpamGeometry paper_geometry(double l0 = 0.030) {
  SpamGeometry g;
  g.R_c = 0.005;
  g.R_act = 0.01718;
  g.l_0 = l0;
  g.a_corr = 1e-4;
  return g;
}
}  // namespace

TEST_CASE("phi_saturated at the paper constants") {
  auto g = paper_geometry();
  CHECK(phi_saturated(g) == Catch::Approx(std::acos(0.005 / 0.01718)).epsilon(1e-14));
  CHECK(phi_saturated(g) == Catch::Approx(1.2754867).margin(1e-6));

  g.R_act = g.R_c + 1e-15;
  CHECK(phi_saturated(g) == Catch::Approx(0.0).margin(1e-6));

  g.R_c = 1e-12;
  g.R_act = 0.01718;
  CHECK(phi_saturated(g) == Catch::Approx(kPi / 2).margin(1e-9));
}

TEST_CASE("geometry validation") {
  SpamGeometry g = paper_geometry();
  g.R_c = 0.02;  // exceeds R_act
  CHECK_THROWS_AS(phi_saturated(g), DomainError);
  g = paper_geometry();
  g.l_0 = 0.0;
  CHECK_THROWS_AS(solve_strain_force(g, 0.3, 1e4), DomainError);
}

TEST_CASE("force vanishes exactly at full contraction") {
  for (double l0 : {0.02, 0.03, 0.06}) {
    SpamState st = solve_strain_force(paper_geometry(l0), 0.5, 12345.0);
    CHECK(st.F_t == 0.0);
  }
}

TEST_CASE("solved states satisfy both governing equations") {
  // self-consistency residual oracle: plug the solution back into Eq 1a/1b
  for (double l0 : {0.02, 0.03, 0.05, 0.08}) {
    auto g = paper_geometry(l0);
    double m_lo = m_at_zero_strain(g);
    for (int i = 0; i < 25; ++i) {
      double m = m_lo + (0.5 - m_lo) * i / 24.0;
      SpamState st = solve_strain_force(g, m, 8000.0);
      auto [r1, r2] = spam_residuals(g, st.m, st.phi_Rc, st.l_a, st.eps);
      CHECK(std::fabs(r1) <= 1e-8);
      CHECK(std::fabs(r2) <= 1e-8);
    }
  }
}

TEST_CASE("regime switch is consistent with the saturation angle") {
  auto g = paper_geometry(0.05);  // long enough to saturate within the range
  double phi_sat = phi_saturated(g);
  double m_lo = m_at_zero_strain(g);
  bool saw_unsat = false, saw_sat = false;
  for (int i = 0; i < 40; ++i) {
    double m = m_lo + (0.5 - m_lo) * i / 39.0;
    SpamState st = solve_strain_force(g, m, 5000.0);
    if (st.regime == SpamRegime::kUnsaturated) {
      saw_unsat = true;
      CHECK(st.phi_Rc <= phi_sat + 1e-12);
      CHECK(st.l_a == Catch::Approx(g.l_0));
    } else {
      saw_sat = true;
      CHECK(st.phi_Rc == Catch::Approx(phi_sat));
      CHECK(st.l_a < g.l_0);
    }
  }
  CHECK(saw_unsat);
  CHECK(saw_sat);
}

TEST_CASE("strain rises and force falls monotonically in m") {
  // dense numeric sweep oracle
  for (double l0 : {0.02, 0.04, 0.08}) {
    auto g = paper_geometry(l0);
    double m_lo = m_at_zero_strain(g);
    double prev_eps = -1.0, prev_ft = 1e30;
    for (int i = 0; i < 50; ++i) {
      double m = m_lo + (0.5 - m_lo) * i / 49.0;
      SpamState st = solve_strain_force(g, m, 1e4);
      CHECK(st.eps > prev_eps);
      CHECK(st.F_t < prev_ft);
      prev_eps = st.eps;
      prev_ft = st.F_t;
    }
  }
}

TEST_CASE("invalid contraction parameters are rejected") {
  auto g = paper_geometry();
  CHECK_THROWS_AS(solve_strain_force(g, 0.0, 1e4), DomainError);
  CHECK_THROWS_AS(solve_strain_force(g, 0.6, 1e4), DomainError);
  // below the zero-strain point the state violates eps >= 0
  double m_lo = m_at_zero_strain(g);
  CHECK_THROWS_AS(solve_strain_force(g, 0.5 * m_lo, 1e4), InfeasibleError);
}

TEST_CASE("sampled curves") {
  auto g = paper_geometry();

  SECTION("two-point curve ends at zero force") {
    auto curve = sample_curve(g, 9000.0, 2);
    REQUIRE(curve.size() == 2);
    CHECK(curve.back().second == 0.0);
    CHECK(curve.front().first < curve.back().first);
  }

  SECTION("force strictly decreasing in strain, no duplicate strains") {
    auto curve = sample_curve(g, 9000.0, 80);
    for (size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i].first > curve[i - 1].first);
      CHECK(curve[i].second < curve[i - 1].second);
    }
  }

  SECTION("doubling pressure doubles force pointwise") {
    auto c1 = sample_curve(g, 6000.0, 12);
    auto c2 = sample_curve(g, 12000.0, 12);
    for (size_t i = 0; i + 1 < c1.size(); ++i) {  // last point is 0 = 2*0
      CHECK(c2[i].first == Catch::Approx(c1[i].first).epsilon(1e-12));
      CHECK(c2[i].second == Catch::Approx(2.0 * c1[i].second).epsilon(1e-12));
    }
  }

  SECTION("argument validation") {
    CHECK_THROWS_AS(sample_curve(g, 9000.0, 1), DomainError);
    CHECK_THROWS_AS(sample_curve(g, 0.0, 10), DomainError);
  }
}

TEST_CASE("strain inversion recovers the forward curve") {
  auto g = paper_geometry(0.04);
  auto curve = sample_curve(g, 7500.0, 20);
  for (auto& [eps, ft] : curve) {
    CHECK(force_at_strain(g, 7500.0, eps) == Catch::Approx(ft).margin(1e-6));
  }
  // outside the feasible band
  CHECK(force_at_strain(g, 7500.0, 0.99) == 0.0);
  double blocked = force_at_strain(g, 7500.0, 0.0);
  CHECK(force_at_strain(g, 7500.0, -0.5) == Catch::Approx(blocked));
  CHECK(blocked > 0.0);
}
