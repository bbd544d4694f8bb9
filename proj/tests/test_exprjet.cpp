#include <gtest/gtest.h>

#include <random>

#include "robinson/exprjet.hpp"
#include "test_util.hpp"

using namespace robinson;

namespace {

ChartPtr uvxy() { return Chart::make("mink", {"u", "v", "x", "y"}, {{"w", "x", "y"}}); }

}  // namespace

TEST(Exprjet, ChartRejectsDuplicates) {
  EXPECT_THROW(Chart::make("bad", {"u", "u", "x"}), PreconditionError);
  EXPECT_THROW(Chart::make("bad", {"u", "v", "x"}, {{"u", "v", "x"}}), PreconditionError);
  EXPECT_THROW(Chart::make("bad", {"u", "v", "x"}, {{"w", "x", "x"}}), PreconditionError);
}

TEST(Exprjet, ParsePolynomialTree) {
  auto e = parse("u*v + x^2", uvxy());
  // Add(Mul(u,v), Pow(x))
  EXPECT_EQ(e.root().op, Op::Add);
  EXPECT_EQ(e.root().kids[0]->op, Op::Mul);
  EXPECT_EQ(e.root().kids[1]->op, Op::Pow);
  EXPECT_EQ(e.root().kids[1]->exponent, 2);
  EXPECT_EQ(e.node_count(), 6u);
}

TEST(Exprjet, ConjNode) {
  auto e = parse("conj(w)", uvxy());
  EXPECT_EQ(e.root().op, Op::Call);
  EXPECT_EQ(e.root().fn, Fn::Conj);
  EXPECT_EQ(e.root().kids[0]->op, Op::ComplexCoord);
}

TEST(Exprjet, PoleOnlyAtEvaluation) {
  auto e = parse("1/(w+conj(w))", uvxy());
  std::vector<double> ok{0, 0, 1, 2}, pole{0, 0, 0, 2};
  EXPECT_NEAR(e.value(ok).real(), 0.5, 1e-15);
  try {
    e.value(pole);
    FAIL() << "expected a domain error";
  } catch (const DomainError& err) {
    EXPECT_NE(std::string(err.what()).find("w + conj(w)"), std::string::npos) << err.what();
  }
}

TEST(Exprjet, ParseErrors) {
  auto c = uvxy();
  EXPECT_THROW(parse("u + q", c), ParseError);
  EXPECT_THROW(parse("u * (v", c), ParseError);
  EXPECT_THROW(parse("exp()", c), ParseError);
  EXPECT_THROW(parse("exp", c), ParseError);
  EXPECT_THROW(parse("foo(u)", c), ParseError);
  EXPECT_THROW(parse("u^x", c), ParseError);
  try {
    parse("u + $", c);
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Exprjet, RoundTrip) {
  auto c = uvxy();
  std::map<std::string, cplx> params{{"m", 1.0}};
  for (const char* s : {"u*v + x^2", "-(u - v) - (x - y)", "1/2*u", "u/(v*x)", "-u^2",
                        "(-u)^2", "x^(-3)", "exp(-i*w)*conj(w)^2", "u - (v + x)",
                        "2.5e-3*sqrt(u + 1) + re(w)*im(w)", "-m/v", "0.1", "u/v/x",
                        "sin(cos(u))^(-1)", "- - u"}) {
    auto e = parse(s, c, params);
    auto e2 = parse(e.to_string(), c, params);
    EXPECT_TRUE(e.same_tree(e2)) << s << " -> " << e.to_string();
    EXPECT_EQ(e2.to_string(), e.to_string());
  }
}

TEST(Exprjet, PolynomialJet) {
  auto e = parse("u*v + x^2", uvxy());
  std::vector<double> p{1, 2, 3, 0};
  Jet2 j = e.jet(p);
  EXPECT_EQ(j.value, cplx(11));
  EXPECT_EQ(j.grad[0], cplx(2));
  EXPECT_EQ(j.grad[1], cplx(1));
  EXPECT_EQ(j.grad[2], cplx(6));
  EXPECT_EQ(j.grad[3], cplx(0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      cplx expect = 0.0;
      if ((a == 0 && b == 1) || (a == 1 && b == 0)) expect = 1.0;
      if (a == 2 && b == 2) expect = 2.0;
      EXPECT_EQ(j.dd(a, b), expect) << a << b;
    }
}

TEST(Exprjet, ExpMatchesFiniteDifferences) {
  auto e = parse("exp(u)", uvxy());
  std::vector<double> p{0.3, 0, 0, 0};
  const auto fd = testutil::finite_difference(e, p, 1e-5);
  Jet2 j = e.jet(p);
  EXPECT_LT(std::abs(j.grad[0] - fd.grad[0]) / std::abs(j.grad[0]), 1e-6);
  EXPECT_LT(std::abs(j.dd(0, 0) - fd.hess[0]) / std::abs(j.dd(0, 0)), 1e-6);
}

TEST(Exprjet, ComplexProduct) {
  auto e = parse("i*(w*conj(w))", uvxy());
  std::vector<double> p{0, 0, 1, 2};
  Jet2 j = e.jet(p);
  EXPECT_NEAR(std::abs(j.value - cplx(0, 5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(j.grad[2] - cplx(0, 2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(j.grad[3] - cplx(0, 4)), 0.0, 1e-15);
}

TEST(Exprjet, Wirtinger) {
  auto c = uvxy();
  std::vector<double> p{0, 0, 1, 2};
  auto a = wirtinger(parse("w", c), p, "w");
  EXPECT_NEAR(std::abs(a.dw - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(a.dwbar), 0, 1e-15);
  auto b = wirtinger(parse("conj(w)", c), p, "w");
  EXPECT_NEAR(std::abs(b.dw), 0, 1e-15);
  EXPECT_NEAR(std::abs(b.dwbar - 1.0), 0, 1e-15);
  auto m = wirtinger(parse("w*conj(w)", c), p, "w");
  EXPECT_NEAR(std::abs(m.dw - cplx(1, -2)), 0, 1e-14);
  EXPECT_NEAR(std::abs(m.dwbar - cplx(1, 2)), 0, 1e-14);
  EXPECT_THROW(wirtinger(parse("w", c), p, "z"), PreconditionError);
}

TEST(Exprjet, HolomorphyDetector) {
  auto c = uvxy();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (const char* s : {"w^3 - 2*w", "exp(i*w)/(w - 4)", "sqrt(w + 3)*log(w + 5)", "sin(w)*cos(w)^2"})
    for (int k = 0; k < 20; ++k) {
      std::vector<double> p{U(rng), U(rng), U(rng), U(rng)};
      EXPECT_LT(std::abs(wirtinger(parse(s, c), p, "w").dwbar), 1e-12) << s;
    }
}

TEST(Exprjet, JetProductIsExact) {
  auto c = uvxy();
  auto a = parse("exp(u)*conj(w)", c);
  auto b = parse("sin(v) + w^2", c);
  std::vector<double> p{0.2, -0.4, 0.7, 1.1};
  Jet2 prod = (a * b).jet(p);
  Jet2 ref = a.jet(p) * b.jet(p);
  EXPECT_EQ(prod.value, ref.value);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(prod.grad[i], ref.grad[i]);
  for (int i = 0; i < 36; ++i) EXPECT_EQ(prod.hess[i], ref.hess[i]);
}

TEST(Exprjet, HessianExactlySymmetric) {
  auto e = parse("exp(u*v)*conj(w)^3/(1 + x*y)", uvxy());
  Jet2 j = e.jet(std::vector<double>{0.3, 0.4, 0.5, 0.6});
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_EQ(j.dd(a, b), j.dd(b, a));
}

TEST(Exprjet, FiniteDifferenceOracleOnMixedExpressions) {
  auto c = uvxy();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.3, 1.2);
  for (const char* s : {"v^2*(1 + w*conj(w)/4)^(-2)", "log(u + v)*re(w)^2", "sqrt(x^2 + y^2 + u)",
                        "conj(w)*exp(-u)/(v + 2)", "im(w^3)*cos(u*v)"}) {
    auto e = parse(s, c);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> p{U(rng), U(rng), U(rng), U(rng)};
      EXPECT_LT(testutil::jet_fd_error(e, p), 1e-5) << s;
    }
  }
}

TEST(Exprjet, LetsAndParams) {
  auto c = uvxy();
  std::map<std::string, cplx> params{{"m", 2.0}};
  std::map<std::string, Expression> lets;
  lets.emplace("rho", parse("v^2", c));
  auto e = parse("m*rho", c, params, &lets);
  EXPECT_NEAR(e.value(std::vector<double>{0, 3, 0, 0}).real(), 18.0, 1e-14);
}

TEST(Exprjet, RebindByName) {
  auto c = uvxy();
  auto other = Chart::make("swap", {"x", "y", "u", "v"}, {{"w", "x", "y"}});
  auto e = parse("u + 10*x + 100*conj(w)", c);
  auto f = e.rebind(other);
  EXPECT_NEAR(std::abs(f.value(std::vector<double>{1, 2, 3, 4}) - cplx(3 + 10 + 100, -200)), 0, 1e-12);
}
