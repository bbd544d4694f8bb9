#include <gtest/gtest.h>

#include <random>

#include "metrics.hpp"
#include "robinson/algclass.hpp"

using namespace robinson;
using namespace testmetrics;

namespace {

const cplx I(0, 1);

CVec random_cvec(std::mt19937_64& rng, int n = 4) {
  std::normal_distribution<double> N;
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(N(rng), N(rng));
  return v;
}

ProjRoot random_root(std::mt19937_64& rng) {
  CVec v = random_cvec(rng, 2);
  return ProjRoot::normalized(v(0), v(1));
}

// quartic from p(z) = sum_k a_k z^(4-k): psi_k = a_k / binom(4,k)
SymSpinor4 from_poly(std::array<cplx, 5> a) {
  SymSpinor4 s;
  for (int k = 0; k < 5; ++k) s.psi[k] = a[k] / kBinom4[k];
  return s;
}

}  // namespace

TEST(Clifford, Invariants) {
  for (Signature sig : {Signature::Euclidean, Signature::Lorentzian}) {
    CliffordRep r = build_clifford(sig);
    CliffordChecks c = check_clifford(r);
    EXPECT_EQ(c.anticommutator, 0.0);
    EXPECT_EQ(c.gamma_squared, 0.0);
    EXPECT_EQ(c.gamma_anticomm, 0.0);
    EXPECT_LT(c.c_conj, 1e-12);
    EXPECT_LT(c.b_intertwines, 1e-12);
    EXPECT_LT(c.epsilon_antisym, 1e-12);
    EXPECT_GT(r.epsilon().cwiseAbs().maxCoeff(), 0.1);
  }
  CliffordRep L = build_clifford(Signature::Lorentzian);
  CMat g5 = L.gamma[0] * L.gamma[1] * L.gamma[2] * L.gamma[3];
  EXPECT_EQ((L.Gamma - I * g5).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Clifford, GammaSquaredIsNorm) {
  std::mt19937_64 rng(1);
  for (Signature sig : {Signature::Euclidean, Signature::Lorentzian}) {
    CliffordRep r = build_clifford(sig);
    for (int t = 0; t < 50; ++t) {
      CVec w = random_cvec(rng);
      CMat gw = r.gamma_of(w);
      const cplx n = (w.transpose() * r.metric() * w)(0, 0);
      EXPECT_LT((gw * gw - n * CMat::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12 * (1 + std::abs(n)));
    }
  }
}

TEST(Clifford, MtnFromSpinor) {
  std::mt19937_64 rng(2);
  for (Signature sig : {Signature::Euclidean, Signature::Lorentzian}) {
    CliffordRep r = build_clifford(sig);
    MetricAtPoint g(r.metric());
    for (int chir : {1, -1}) {
      int sign = 0;
      for (int t = 0; t < 20; ++t) {
        const CMat& basis = chir > 0 ? r.splus : r.sminus;
        CVec phi = basis * random_cvec(rng, 2);
        ASSERT_EQ(chirality(phi, r), chir);
        CMat N = mtn_from_spinor(phi, r);
        ASSERT_EQ(N.cols(), 2);
        for (int c = 0; c < 2; ++c) EXPECT_LT((r.gamma_of(N.col(c)) * phi).norm(), 1e-12);
        EXPECT_TRUE(mtn_check({N.col(0), N.col(1)}, g).ok());
        // the sign of *(m1 ^ m2) = s m1 ^ m2 is fixed by the chirality
        FormAtPoint w = wedge(FormAtPoint::one_form(g.lower(N.col(0))), FormAtPoint::one_form(g.lower(N.col(1))));
        FormAtPoint st = hodge(w, g);
        cplx num = 0.0;
        w.for_each([&](Mask m, cplx c) { num += std::conj(c) * st[m]; });
        const cplx ratio = num / (w.norm() * w.norm());
        EXPECT_LT((st - ratio * w).max_abs(), 1e-10);
        const cplx expected_mag = sig == Signature::Euclidean ? cplx(1) : I;
        EXPECT_NEAR(std::abs(std::abs(ratio) - 1.0), 0.0, 1e-10);
        const int s = std::real(ratio / expected_mag) > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        EXPECT_EQ(s, sign);
      }
    }
  }
  CliffordRep r = build_clifford(Signature::Euclidean);
  EXPECT_THROW(mtn_from_spinor(CVec::Zero(4), r), PreconditionError);
  EXPECT_THROW(mtn_from_spinor(CVec::Ones(4), r), PreconditionError);
}

TEST(Clifford, ChargeConjugation) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (Signature sig : {Signature::Euclidean, Signature::Lorentzian}) {
    CliffordRep r = build_clifford(sig);
    const double sign = sig == Signature::Euclidean ? -1.0 : 1.0;
    for (int t = 0; t < 20; ++t) {
      CVec phi = random_cvec(rng);
      CVec cc = charge_conjugate(charge_conjugate(phi, r), r);
      EXPECT_LT((cc - sign * phi).norm(), 1e-12 * phi.norm());
      CVec v(4);
      for (int i = 0; i < 4; ++i) v(i) = N(rng);
      CVec lhs = charge_conjugate(r.gamma_of(v) * phi, r);
      CVec rhs = r.gamma_of(v) * charge_conjugate(phi, r);
      EXPECT_LT((lhs - rhs).norm(), 1e-12 * (1 + lhs.norm()));
    }
    EXPECT_EQ(charge_conjugate(CVec::Zero(4), r).norm(), 0.0);
  }
  // Euclidean C preserves chirality, Lorentzian C swaps it
  CliffordRep E = build_clifford(Signature::Euclidean), L = build_clifford(Signature::Lorentzian);
  EXPECT_EQ(chirality(charge_conjugate(E.splus.col(0), E), E), 1);
  EXPECT_EQ(chirality(charge_conjugate(L.splus.col(0), L), L), -1);
}

TEST(Quartic, Examples) {
  auto r1 = classify_quartic(from_poly({1, 0, 0, 0, -1}));
  EXPECT_EQ(r1.type, PetrovType::I);
  for (cplx z : {cplx(1), cplx(-1), I, -I}) {
    double best = 1.0;
    for (auto& r : r1.roots) best = std::min(best, chordal(r, ProjRoot::affine(z)));
    EXPECT_LT(best, 1e-10);
  }
  // (z-1)^2 (z-2)^2 = z^4 - 6z^3 + 13z^2 - 12z + 4
  auto r2 = classify_quartic(from_poly({1, -6, 13, -12, 4}));
  EXPECT_EQ(r2.type, PetrovType::D);
  EXPECT_EQ(r2.partition(), (std::vector<int>{2, 2}));
  // only psi_4: quadruple root at infinity
  SymSpinor4 n;
  n.psi[4] = 3.0;
  auto r3 = classify_quartic(n);
  EXPECT_EQ(r3.type, PetrovType::N);
  ASSERT_EQ(r3.roots.size(), 1u);
  EXPECT_TRUE(r3.roots[0].at_infinity(1e-8));
  EXPECT_EQ(classify_quartic(SymSpinor4{}).type, PetrovType::O);
  EXPECT_THROW(classify_quartic(n, 0.0), PreconditionError);
  // (z-1)(z+1)(z-3)^2 and (z-2)^3 (z+i)
  EXPECT_EQ(classify_quartic(quartic_from_roots({ProjRoot::affine(1), ProjRoot::affine(-1), ProjRoot::affine(3),
                                                 ProjRoot::affine(3)}))
                .type,
            PetrovType::II);
  EXPECT_EQ(classify_quartic(quartic_from_roots({ProjRoot::affine(2), ProjRoot::affine(2), ProjRoot::affine(2),
                                                 ProjRoot::affine(-I)}))
                .type,
            PetrovType::III);
}

TEST(Quartic, RandomOracle) {
  const double tol = 1e-6;
  std::mt19937_64 rng(4);
  const std::vector<std::vector<int>> parts = {{1, 1, 1, 1}, {1, 1, 2}, {1, 3}, {2, 2}, {4}};
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> logscale(-3, 3);
  int wrong = 0;
  for (int t = 0; t < 500; ++t) {
    const auto& part = parts[pick(rng)];
    std::vector<ProjRoot> distinct;
    while (distinct.size() < part.size()) {
      ProjRoot r = random_root(rng);
      bool ok = true;
      for (auto& d : distinct) ok = ok && chordal(d, r) >= 10 * tol;
      if (ok) distinct.push_back(r);
    }
    std::vector<ProjRoot> all;
    for (std::size_t j = 0; j < part.size(); ++j)
      for (int m = 0; m < part[j]; ++m) all.push_back(distinct[j]);
    const cplx scale = std::polar(std::pow(10.0, logscale(rng)), 1.0 + t);
    SymSpinor4 psi = quartic_from_roots(all, scale);
    auto rep = classify_quartic(psi, tol);
    auto want = part;
    std::sort(want.begin(), want.end());
    if (rep.partition() != want) ++wrong;
    // each expected root is recovered
    for (auto& d : distinct) {
      double best = 1.0;
      for (auto& r : rep.roots) best = std::min(best, chordal(r, d));
      EXPECT_LT(best, 1e-6);
    }
  }
  EXPECT_EQ(wrong, 0);
}

TEST(Quartic, CloseButDistinctRoots) {
  // simple roots 10 tol apart stay simple
  const double tol = 1e-6;
  for (double sep : {1e-5, 1e-4, 1e-2}) {
    auto psi = quartic_from_roots({ProjRoot::affine(0.5), ProjRoot::affine(0.5 + sep * 1.25), ProjRoot::affine(-2),
                                   ProjRoot::affine(I)});
    EXPECT_EQ(classify_quartic(psi, tol).type, PetrovType::I) << sep;
  }
}

TEST(Quartic, FactorizationReconstructs) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<ProjRoot> roots;
    for (int k = 0; k < 4; ++k) roots.push_back(random_root(rng));
    SymSpinor4 psi = quartic_from_roots(roots, cplx(0.3, -1.2));
    auto rep = classify_quartic(psi);
    std::vector<ProjRoot> expanded;
    for (std::size_t j = 0; j < rep.roots.size(); ++j)
      for (int m = 0; m < rep.multiplicity[j]; ++m) expanded.push_back(rep.roots[j]);
    SymSpinor4 back = quartic_from_roots(expanded);
    // compare up to a complex scale
    int k0 = 0;
    for (int k = 1; k < 5; ++k)
      if (std::abs(psi.psi[k]) > std::abs(psi.psi[k0])) k0 = k;
    const cplx s = psi.psi[k0] / back.psi[k0];
    double err = 0.0;
    for (int k = 0; k < 5; ++k) err = std::max(err, std::abs(psi.psi[k] - s * back.psi[k]));
    EXPECT_LT(err / psi.max_abs(), 1e-9);
  }
}

TEST(Quartic, Riemannian) {
  CliffordRep r = build_clifford(Signature::Euclidean);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    ProjRoot a = random_root(rng), b = random_root(rng);
    ProjRoot ac = conjugate_root(a, r), bc = conjugate_root(b, r);
    EXPECT_GT(chordal(a, ac), 1e-3);
    EXPECT_EQ(classify_riemannian(quartic_from_roots({a, ac, b, bc}), r), PetrovType::I);
    EXPECT_EQ(classify_riemannian(quartic_from_roots({a, ac, a, ac}), r), PetrovType::D);
    EXPECT_THROW(classify_riemannian(quartic_from_roots({a, a, b, bc}), r), PreconditionError);
  }
  EXPECT_EQ(classify_riemannian(SymSpinor4{}, r), PetrovType::O);
}

namespace {

void expect_type(const MetricField& g, const std::vector<Point>& pts, PetrovType want) {
  for (const auto& p : pts)
    for (std::uint64_t seed : {0ull, 11ull, 22ull, 33ull, 44ull}) {
      auto mp = petrov_of_metric(g, p, 1e-6, seed);
      EXPECT_EQ(mp.report.type, want) << "seed " << seed << " backward " << mp.report.backward_error;
    }
}

}  // namespace

TEST(Petrov, CatalogMetrics) {
  auto c = uvxy();
  expect_type(plane_wave(c, "x^2 - y^2"), box4(-1, 1).sample(10, 7), PetrovType::N);
  expect_type(minkowski(c), box4(-1, 1).sample(3, 8), PetrovType::O);
  expect_type(robinson_congruence(c), box4(-1, 1).sample(3, 8), PetrovType::O);
  expect_type(schwarzschild(c), box4(2.1, 6).sample(10, 9), PetrovType::D);
  auto gc = goedel_chart();
  DomainBox gb;
  gb.bounds = {{-1, 1}, {-1, 1}, {-1, 1}, {0.2, 5}};
  expect_type(goedel(gc), gb.sample(10, 10), PetrovType::D);
}

namespace {

// eigenvalues of C^{ab}_{cd} acting on bivectors, independent of any tetrad
std::vector<cplx> bivector_spectrum(const CurvatureAtPoint& k) {
  const CMat& gi = k.metric.g_inv;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) pairs.push_back({a, b});
  CMat M(6, 6);
  for (int P = 0; P < 6; ++P)
    for (int Q = 0; Q < 6; ++Q) {
      cplx s = 0.0;
      for (int e = 0; e < 4; ++e)
        for (int f = 0; f < 4; ++f)
          s += gi(pairs[P].first, e) * gi(pairs[P].second, f) * k.weyl(e, f, pairs[Q].first, pairs[Q].second);
      M(P, Q) = s;
    }
  Eigen::ComplexEigenSolver<CMat> es(M);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + 6);
  return ev;
}

}  // namespace

TEST(Petrov, ThreeCongruenceIsAlgebraicallySpecial) {
  // The three-congruence metric lambda kappa + mu mubar has a repeated
  // eigenvalue of the bivector Weyl operator on the self-dual block, so its
  // Weyl tensor is not of type I; the quartic shows a single double root.
  auto c = uvxy();
  DomainBox tb;
  tb.bounds = {{-1, 1}, {-1, 1}, {0.1, 2}, {-1, 1}};
  auto g = threecong(c);
  for (const auto& p : tb.sample(10, 11)) {
    auto k = curvature_at(g, p);
    auto ev = bivector_spectrum(k);
    int most = 0;
    for (cplx a : ev) {
      int n = 0;
      for (cplx b : ev) n += std::abs(a - b) < 1e-6 * (1 + k.weyl.max_abs());
      most = std::max(most, n);
    }
    // type I: each value at most twice (self-dual and anti-self-dual copies)
    EXPECT_GE(most, 3);
  }
  expect_type(g, tb.sample(10, 11), PetrovType::II);
}

TEST(Petrov, ConformalRescalingKeepsType) {
  auto c = uvxy();
  auto gc = goedel_chart();
  DomainBox gb;
  gb.bounds = {{-1, 1}, {-1, 1}, {-1, 1}, {0.2, 5}};
  auto scaled = [](const MetricField& g, const std::string& omega2) {
    MetricField h = g;
    ScalarField f(parse(omega2, g.chart_ptr()));
    for (int i = 0; i < g.dim(); ++i)
      for (int j = i; j < g.dim(); ++j) h.set(i, j, f * g(i, j));
    return h;
  };
  for (const auto& p : gb.sample(5, 12))
    EXPECT_EQ(petrov_of_metric(scaled(goedel(gc), "exp(0.2*U)"), p).report.type, PetrovType::D);
  for (const auto& p : box4(-1, 1).sample(5, 13))
    EXPECT_EQ(petrov_of_metric(scaled(plane_wave(c, "x^2 - y^2"), "exp(0.2*u)"), p).report.type, PetrovType::N);
}
