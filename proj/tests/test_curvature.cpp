#include <gtest/gtest.h>

#include "metrics.hpp"
#include "robinson/curvature.hpp"
#include "test_util.hpp"

using namespace robinson;
using namespace testmetrics;

TEST(Curvature, MinkowskiVanishes) {
  auto c = uvxy();
  for (const auto& p : box4(-1, 1).sample(5, 1)) {
    auto k = curvature_at(minkowski(c), p);
    EXPECT_LE(k.christoffel.max_abs(), 1e-10);
    EXPECT_LE(k.riemann.max_abs(), 1e-10);
    EXPECT_LE(k.ricci.max_abs(), 1e-10);
    EXPECT_LE(k.weyl.max_abs(), 1e-10);
  }
}

TEST(Curvature, RobinsonCongruenceFlat) {
  auto c = uvxy();
  auto r = is_flat(robinson_congruence(c), box4(-2, 2).sample(100, 2));
  EXPECT_EQ(r.samples, 100);
  EXPECT_LT(r.max_residual, 1e-8);
}

TEST(Curvature, PlaneWave) {
  auto c = uvxy();
  auto pts = box4(-1, 1).sample(50, 3);
  auto g = plane_wave(c, "x^2 - y^2");
  EXPECT_LT(is_ricci_flat(g, pts).max_residual, 1e-8);
  EXPECT_GT(is_flat(g, pts).min_residual, 1e-3);
  for (const auto& p : pts) EXPECT_GT(curvature_at(g, p).weyl.max_abs(), 1e-3);
  EXPECT_GT(is_ricci_flat(plane_wave(c, "x^2 + y^2"), pts).min_residual, 1e-3);
  // linear profile is flat
  EXPECT_LT(is_flat(plane_wave(c, "3*x - y + u"), pts).max_residual, 1e-8);
}

TEST(Curvature, SchwarzschildRicciFlatNotFlat) {
  auto c = uvxy();
  auto pts = box4(2.1, 6).sample(50, 4);
  auto g = schwarzschild(c);
  EXPECT_LT(is_ricci_flat(g, pts).max_residual, 1e-8);
  EXPECT_GT(is_flat(g, pts).min_residual, 1e-4);
}

TEST(Curvature, SymmetrySuite) {
  auto c = uvxy();
  auto gc = goedel_chart();
  DomainBox gb;
  gb.bounds = {{-1, 1}, {-1, 1}, {-1, 1}, {0.2, 5}};
  std::vector<std::pair<MetricField, std::vector<Point>>> cases = {
      {schwarzschild(c), box4(2.1, 6).sample(10, 5)},
      {plane_wave(c, "x^2 - y^2 + u*x*y"), box4(-1, 1).sample(10, 6)},
      {goedel(gc), gb.sample(10, 7)},
      {robinson_congruence(c), box4(-1, 1).sample(10, 8)}};
  for (auto& [g, pts] : cases)
    for (const auto& p : pts) {
      auto s = curvature_symmetries(curvature_at(g, p));
      EXPECT_LT(s.pair_antisym, 1e-9);
      EXPECT_LT(s.pair_exchange, 1e-9);
      EXPECT_LT(s.bianchi, 1e-9);
      EXPECT_LT(s.weyl_trace, 1e-9);
    }
}

TEST(Curvature, ChristoffelMatchesFiniteDifferences) {
  // Gamma from a finite-differenced metric (values only), h = 1e-5
  auto c = uvxy();
  auto gc = goedel_chart();
  DomainBox gb;
  gb.bounds = {{-1, 1}, {-1, 1}, {-1, 1}, {0.2, 5}};
  std::vector<std::pair<MetricField, std::vector<Point>>> cases = {
      {schwarzschild(c), box4(2.1, 6).sample(5, 9)},
      {goedel(gc), gb.sample(5, 10)},
      {robinson_congruence(c), box4(-1, 1).sample(5, 11)}};
  const double h = 1e-5;
  for (auto& [g, pts] : cases)
    for (const auto& p : pts) {
      const auto k = curvature_at(g, p);
      CMat dg[4];
      for (int a = 0; a < 4; ++a) {
        auto q = p;
        q[a] += h;
        CMat gp = g.at(q).g;
        q[a] -= 2 * h;
        CMat gm = g.at(q).g;
        dg[a] = (gp - gm) / (2 * h);
      }
      const CMat gi = g.at(p).g_inv;
      for (int r = 0; r < 4; ++r)
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n) {
            cplx v = 0.0;
            for (int s = 0; s < 4; ++s) v += 0.5 * gi(r, s) * (dg[m](s, n) + dg[n](s, m) - dg[s](m, n));
            EXPECT_LT(std::abs(v - k.christoffel(r, m, n)), 1e-5 * (1 + k.christoffel.max_abs()));
          }
    }
}

TEST(Curvature, SelfDualSplit) {
  auto c = uvxy();
  auto pts = box4(-1, 1).sample(5, 12);
  for (const auto& p : pts) {
    auto s0 = sd_asd_split(curvature_at(minkowski(c), p));
    EXPECT_LE(s0.plus.max_abs(), 1e-10);
    EXPECT_LE(s0.minus.max_abs(), 1e-10);
    auto k = curvature_at(plane_wave(c, "x^2 - y^2"), p);
    auto s = sd_asd_split(k);
    EXPECT_GT(s.plus.max_abs(), 1e-3);
    const cplx I(0, 1);
    Tensor st = star_first_pair(s.plus, k.metric, 1);
    double err = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < st.data().size(); ++i) {
      err = std::max(err, std::abs(st.data()[i] - I * s.plus.data()[i]));
      sum = std::max(sum, std::abs(s.plus.data()[i] + s.minus.data()[i] - k.weyl.data()[i]));
    }
    EXPECT_LT(err, 1e-9 * (1 + k.weyl.max_abs()));
    EXPECT_LT(sum, 1e-12);
  }
  auto gc = goedel_chart();
  DomainBox gb;
  gb.bounds = {{-1, 1}, {-1, 1}, {-1, 1}, {0.2, 5}};
  for (const auto& p : gb.sample(10, 13)) {
    auto s = sd_asd_split(curvature_at(goedel(gc), p));
    double err = 0.0;
    for (std::size_t i = 0; i < s.plus.data().size(); ++i)
      err = std::max(err, std::abs(std::conj(s.plus.data()[i]) - s.minus.data()[i]));
    EXPECT_LT(err, 1e-9 * (1 + s.plus.max_abs()));
  }
}
