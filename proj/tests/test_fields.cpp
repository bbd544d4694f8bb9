#include <gtest/gtest.h>

#include <random>

#include "robinson/fields.hpp"
#include "test_util.hpp"

using namespace robinson;

namespace {

const cplx I(0, 1);

ChartPtr uvxy() { return Chart::make("mink", {"u", "v", "x", "y"}, {{"w", "x", "y"}}); }
ChartPtr uxy() { return Chart::make("hq", {"u", "x", "y"}, {{"z", "x", "y"}}); }

ScalarField S(const ChartPtr& c, const std::string& s) { return ScalarField(parse(s, c)); }

FormField dxi(const ChartPtr& c, int i) { return coordinate_differential(c, i); }

MetricField minkowski(const ChartPtr& c) {
  return metric_from_terms(c, {{S(c, "1"), dxi(c, 0), dxi(c, 1)},
                               {S(c, "1"), complex_differential(c, "w"), complex_differential(c, "w", true)}});
}

VectorField vec(const ChartPtr& c, std::vector<std::string> s) {
  std::vector<ScalarField> comps;
  for (auto& x : s) comps.push_back(S(c, x));
  return VectorField(c, comps);
}

std::vector<Point> box(int dim, int n, std::uint64_t seed, double lo = 0.3, double hi = 1.7) {
  DomainBox b;
  b.bounds.assign(dim, {lo, hi});
  return b.sample(n, seed);
}

}  // namespace

TEST(Fields, MinkowskiComponents) {
  auto c = uvxy();
  MetricAtPoint g = minkowski(c).at(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(g.g(0, 1), cplx(0.5));
  EXPECT_EQ(g.g(2, 2), cplx(1.0));
  EXPECT_EQ(g.g(3, 3), cplx(1.0));
  EXPECT_EQ(g.g(2, 3), cplx(0.0));
  EXPECT_TRUE(g.lorentzian());
}

TEST(Fields, DOfConstantIsZero) {
  auto c = uvxy();
  EXPECT_EQ(d(dxi(c, 0), std::vector<double>{1, 2, 3, 4}).max_abs(), 0.0);
}

TEST(Fields, DOfHyperquadricKappa) {
  auto c = uxy();
  FormField k(c, 1);
  // du + i(z dzbar - zbar dz)
  k = dxi(c, 0) + S(c, "i*z") * complex_differential(c, "z", true) +
      S(c, "-i*conj(z)") * complex_differential(c, "z");
  for (const auto& p : box(3, 5, 1)) {
    FormAtPoint dk = d(k, p);
    EXPECT_NEAR(std::abs(dk[indices_mask({1, 2})] - 4.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(dk[indices_mask({0, 1})]), 0.0, 1e-14);
  }
}

TEST(Fields, DOfScaledDifferential) {
  auto c = uvxy();
  FormField a(c, 1);
  a.set(indices_mask({0}), S(c, "x^2"));
  std::vector<double> p{0.5, 0.1, 1.5, -0.2};
  FormAtPoint r = d(a, p);
  // 2x dx ^ du = -2x du ^ dx
  EXPECT_NEAR(std::abs(r.at({2, 0}) - 3.0), 0.0, 1e-14);
}

TEST(Fields, DdVanishes) {
  auto c = uvxy();
  FormField a(c, 1);
  a.set(indices_mask({0}), S(c, "exp(u*v)*conj(w)"));
  a.set(indices_mask({2}), S(c, "sin(x*y*u)"));
  a.set(indices_mask({3}), S(c, "v^3/(1 + x^2)"));
  for (const auto& p : box(4, 20, 2)) EXPECT_LT(dd_residual(a, p), 1e-12);
}

TEST(Fields, LieMetricKilling) {
  auto c = uvxy();
  auto kv = vec(c, {"0", "1", "0", "0"});
  for (const auto& p : box(4, 5, 3)) EXPECT_EQ(lie_metric(kv, minkowski(c), p).cwiseAbs().maxCoeff(), 0.0);
  // plane wave f du^2 + 2 du dv + dx^2 + dy^2
  auto pw = metric_from_terms(c, {{S(c, "x^2 - y^2"), dxi(c, 0), dxi(c, 0)},
                                  {S(c, "2"), dxi(c, 0), dxi(c, 1)},
                                  {S(c, "1"), dxi(c, 2), dxi(c, 2)},
                                  {S(c, "1"), dxi(c, 3), dxi(c, 3)}});
  for (const auto& p : box(4, 5, 4)) EXPECT_EQ(lie_metric(kv, pw, p).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fields, LieMetricRobinsonCongruence) {
  auto c = uvxy();
  // kappa = du + i(w dwbar - wbar dw); g = kappa dv + (v^2 + 1) dw dwbar
  FormField kappa = dxi(c, 0) + S(c, "i*w") * complex_differential(c, "w", true) +
                    S(c, "-i*conj(w)") * complex_differential(c, "w");
  auto g = metric_from_terms(c, {{S(c, "1"), kappa, dxi(c, 1)},
                                 {S(c, "v^2 + 1"), complex_differential(c, "w"),
                                  complex_differential(c, "w", true)}});
  auto kv = vec(c, {"0", "1", "0", "0"});
  for (const auto& p : box(4, 5, 5)) {
    CMat L = lie_metric(kv, g, p);
    CMat expect = CMat::Zero(4, 4);
    expect(2, 2) = expect(3, 3) = 2 * p[1];
    EXPECT_LT((L - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Fields, LieForm) {
  auto c = uvxy();
  std::vector<double> p{0.3, 0.7, -0.2, 0.4};
  EXPECT_EQ(lie_form(vec(c, {"1", "0", "0", "0"}), dxi(c, 0), p).max_abs(), 0.0);
  FormField vdu(c, 1);
  vdu.set(indices_mask({0}), S(c, "v"));
  FormAtPoint r = lie_form(vec(c, {"0", "1", "0", "0"}), vdu, p);
  EXPECT_NEAR(std::abs(r[indices_mask({0})] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(r.max_abs(), 1.0, 1e-15);
}

TEST(Fields, CartanFormulaAgreesWithComponents) {
  auto c = uvxy();
  auto k = vec(c, {"v*x", "exp(u)", "conj(w)", "y^2 - u"});
  FormField a1(c, 1);
  a1.set(indices_mask({0}), S(c, "x*y*v"));
  a1.set(indices_mask({1}), S(c, "w^2"));
  a1.set(indices_mask({3}), S(c, "cos(u)"));
  FormField a2(c, 2);
  a2.set(indices_mask({0, 2}), S(c, "exp(v)*y"));
  a2.set(indices_mask({1, 3}), S(c, "conj(w)*u"));
  for (const auto& p : box(4, 200, 6)) {
    EXPECT_LT((lie_form(k, a1, p) - lie_form_direct(k, a1, p)).max_abs(), 1e-8);
    EXPECT_LT((lie_form(k, a2, p) - lie_form_direct(k, a2, p)).max_abs(), 1e-8);
  }
}

TEST(Fields, PullbackIdentityAndConstant) {
  auto c = uvxy();
  ChartMap id(c, c, {S(c, "u"), S(c, "v"), S(c, "x"), S(c, "y")});
  FormField a(c, 2);
  a.set(indices_mask({0, 2}), S(c, "exp(v)*y"));
  a.set(indices_mask({1, 3}), S(c, "conj(w)*u"));
  std::vector<double> p{0.3, 0.7, -0.2, 0.4};
  EXPECT_LT((pullback(id, a, p) - a.at(p)).max_abs(), 1e-15);
  // a map whose last component is constant pulls dy back to zero
  ChartMap f(c, c, {S(c, "u*v"), S(c, "x"), S(c, "y + v"), S(c, "0.25")});
  EXPECT_EQ(pullback(f, dxi(c, 3), p).max_abs(), 0.0);
}

TEST(Fields, PullbackGoedelChange) {
  auto src = Chart::make("goedel3", {"U", "X", "Y"});
  auto tgt = uxy();
  // u = X, z = sqrt(Y) exp(-iU/2)
  ChartMap f(src, tgt, {S(src, "X"), S(src, "sqrt(Y)*cos(U/2)"), S(src, "-sqrt(Y)*sin(U/2)")});
  FormField kp = dxi(tgt, 0) + S(tgt, "i*z") * complex_differential(tgt, "z", true) +
                 S(tgt, "-i*conj(z)") * complex_differential(tgt, "z");
  DomainBox b;
  b.bounds = {{-3, 3}, {-1, 1}, {0.2, 5}};
  for (const auto& p : b.sample(20, 7)) {
    FormAtPoint r = pullback(f, kp, p);
    EXPECT_NEAR(std::abs(r[indices_mask({1})] - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r[indices_mask({0})] + p[2]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r[indices_mask({2})]), 0.0, 1e-12);
    // the jet-level pullback agrees with the pointwise one
    EXPECT_LT((pullback(f, kp).at(p) - r).max_abs(), 1e-12);
  }
}

TEST(Fields, PullbackFunctorial) {
  auto c = uvxy();
  ChartMap f(c, c, {S(c, "u + v^2"), S(c, "v*x"), S(c, "sin(y)"), S(c, "x + u")});
  ChartMap g(c, c, {S(c, "exp(u/3)"), S(c, "v - y"), S(c, "x*u"), S(c, "y^2")});
  FormField a(c, 2);
  a.set(indices_mask({0, 1}), S(c, "u*y + 1"));
  a.set(indices_mask({2, 3}), S(c, "v"));
  a.set(indices_mask({1, 3}), S(c, "x^2"));
  const ChartMap gf = f.then(g);
  for (const auto& p : box(4, 10, 8)) {
    // (g o f)^* a = f^*(g^* a)
    FormAtPoint lhs = pullback(gf, a, p);
    FormAtPoint rhs = pullback(f, pullback(g, a), p);
    EXPECT_LT((lhs - rhs).max_abs(), 1e-10 * (1 + lhs.max_abs()));
  }
}

TEST(Fields, Divergence) {
  auto c = uvxy();
  std::vector<double> p{0.3, 0.7, -0.2, 0.4};
  EXPECT_EQ(divergence(vec(c, {"0", "1", "0", "0"}), minkowski(c), p), cplx(0.0));
  // radial field in a Euclidean plane slice
  auto e = Chart::make("plane", {"x", "y", "s"});
  auto g = metric_from_terms(e, {{S(e, "1"), dxi(e, 0), dxi(e, 0)},
                                 {S(e, "1"), dxi(e, 1), dxi(e, 1)},
                                 {S(e, "1"), dxi(e, 2), dxi(e, 2)}},
                             Signature::Euclidean);
  EXPECT_NEAR(std::abs(divergence(vec(e, {"x", "y", "0"}), g, std::vector<double>{0.4, -1.0, 2.0}) - 2.0), 0, 1e-15);
}

TEST(Fields, SamplingIsDeterministic) {
  DomainBox b;
  b.bounds = {{0, 1}, {2, 3}, {5, 5}};
  auto s1 = b.sample(10, 42), s2 = b.sample(10, 42), s3 = b.sample(10, 43);
  EXPECT_EQ(s1, s2);
  EXPECT_NE(s1, s3);
  for (const auto& p : s1) {
    EXPECT_GE(p[1], 2.0);
    EXPECT_LE(p[1], 3.0);
    EXPECT_EQ(p[2], 5.0);
  }
}

TEST(Fields, MetricJetsMatchFiniteDifferences) {
  auto c = uvxy();
  FormField kappa = dxi(c, 0) + S(c, "i*w") * complex_differential(c, "w", true) +
                    S(c, "-i*conj(w)") * complex_differential(c, "w");
  auto g = metric_from_terms(c, {{S(c, "1"), kappa, dxi(c, 1)},
                                 {S(c, "v^2 + 1"), complex_differential(c, "w"),
                                  complex_differential(c, "w", true)}});
  for (const auto& p : box(4, 5, 9))
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        EXPECT_LT(testutil::jet_fd_error_fn([&](const std::vector<double>& q) { return g(i, j).jet(q); }, p), 1e-5);
}
