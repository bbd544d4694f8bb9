#pragma once

// CR charts (kappa, mu^1..mu^n) on a (2n+1)-dimensional chart: Levi form,
// classification, equivalence of charts, embedding from a defining function
// and the tangential CR equation.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robinson/fields.hpp"

namespace robinson {

struct CRChart {
  ChartPtr chart;
  FormField kappa;
  std::vector<FormField> mu;
  std::string name;

  int n() const { return static_cast<int>(mu.size()); }
};

inline CRChart make_cr_chart(FormField kappa, std::vector<FormField> mu, std::string name = "cr") {
  CRChart c;
  c.chart = kappa.chart_ptr();
  if (kappa.degree() != 1) throw PreconditionError("CR chart: kappa must be a 1-form");
  for (const auto& m : mu)
    if (m.degree() != 1 || m.chart_ptr()->coord_names() != c.chart->coord_names())
      throw PreconditionError("CR chart: mu must be 1-forms on the chart of kappa");
  if (c.chart->dim() != 2 * static_cast<int>(mu.size()) + 1)
    throw PreconditionError("CR chart '" + name + "': chart dimension must be 2n+1");
  c.kappa = std::move(kappa);
  c.mu = std::move(mu);
  c.name = std::move(name);
  return c;
}

namespace cr_detail {

inline CVec components(const FormAtPoint& a) {
  CVec v(a.dim());
  for (int i = 0; i < a.dim(); ++i) v(i) = a[Mask{1} << i];
  return v;
}

/// Rows: kappa, mu^a, conj(mu^a).
inline CMat coframe(const FormField& kappa, const std::vector<FormField>& mu, std::span<const double> p) {
  const int n = static_cast<int>(mu.size());
  const int dim = kappa.chart().dim();
  CMat B(2 * n + 1, dim);
  B.row(0) = components(kappa.at(p)).transpose();
  for (int a = 0; a < n; ++a) {
    CVec m = components(mu[a].at(p));
    B.row(1 + a) = m.transpose();
    B.row(1 + n + a) = m.conjugate().transpose();
  }
  return B;
}

inline FormJet wedge_all(const FormField& kappa, const std::vector<FormField>& mu, std::span<const double> p) {
  FormJet w = kappa.jet(p);
  for (const auto& m : mu) w = wedge(w, m.jet(p));
  return w;
}

inline double ratio(double num, double den) { return num / std::max(den, 1e-300); }

}  // namespace cr_detail

/// |det| of the coframe over the product of its row norms; in [0, 1].
inline double frame_measure(const CRChart& c, std::span<const double> p) {
  const CMat B = cr_detail::coframe(c.kappa, c.mu, p);
  double prod = 1.0;
  for (int i = 0; i < B.rows(); ++i) prod *= B.row(i).norm();
  return cr_detail::ratio(std::abs(B.determinant()), prod);
}

inline void require_frame(const CRChart& c, std::span<const double> p, double tol = 1e-10) {
  if (!(frame_measure(c, p) > tol))
    throw PreconditionError("CR chart '" + c.name + "': frame condition fails at a sample point");
}

/// Largest imaginary part among the components of kappa, relative.
inline double kappa_imag(const CRChart& c, std::span<const double> p) {
  const CVec k = cr_detail::components(c.kappa.at(p));
  return k.imag().cwiseAbs().maxCoeff() / (1.0 + k.cwiseAbs().maxCoeff());
}

/// Norms of d(alpha) ^ omega for alpha in {kappa, mu^a}, omega = kappa ^ mu^1 ^ ... .
/// Each is divided by (1 + |d alpha|) |omega|.
inline std::vector<double> integrability_residuals(const FormField& kappa, const std::vector<FormField>& mu,
                                                   std::span<const double> p) {
  const FormJet w = cr_detail::wedge_all(kappa, mu, p);
  const double wn = w.value().norm();
  std::vector<double> out;
  auto one = [&](const FormField& a) {
    const FormJet da = d(a.jet(p));
    const FormAtPoint dav = da.value();
    if (da.degree() + w.degree() > kappa.chart().dim()) {
      out.push_back(0.0);
      return;
    }
    out.push_back(cr_detail::ratio(wedge(dav, w.value()).norm(), (1.0 + dav.norm()) * wn));
  };
  one(kappa);
  for (const auto& m : mu) one(m);
  return out;
}

/// |dz ^ omega| / ((1 + |dz|) |omega|).
inline double tangential_cr_residual(const ScalarField& z, const CRChart& c, std::span<const double> p) {
  const Jet2 zj = z.jet(p);
  const int n = c.chart->dim();
  FormAtPoint dz(n, 1);
  for (int i = 0; i < n; ++i) dz[Mask{1} << i] = zj.grad[i];
  const FormAtPoint w = cr_detail::wedge_all(c.kappa, c.mu, p).value();
  return cr_detail::ratio(wedge(dz, w).norm(), (1.0 + dz.norm()) * w.norm());
}

enum class LeviVerdict { Trivial, Degenerate, Nondegenerate, Pseudoconvex };

inline const char* verdict_name(LeviVerdict v) {
  switch (v) {
    case LeviVerdict::Trivial: return "trivial";
    case LeviVerdict::Degenerate: return "degenerate";
    case LeviVerdict::Nondegenerate: return "nondegenerate";
    case LeviVerdict::Pseudoconvex: return "pseudoconvex";
  }
  return "?";
}

struct LeviEntry {
  CMat h;
  double hermitian_defect = 0.0;  // |h - h^*| / (1 + |h|)
  double kappa_dkappa = 0.0;      // |kappa ^ d kappa|, normalized
  Eigen::VectorXd eigenvalues;
  int positive = 0, negative = 0, zero = 0;
  LeviVerdict verdict = LeviVerdict::Trivial;
};

/// h with d kappa = i h_ab mu^a ^ conj(mu^b) + ..., found by evaluating d kappa
/// on the frame dual to (kappa, mu, conj mu).
inline LeviEntry levi_form(const CRChart& c, std::span<const double> p, double tol = 1e-8) {
  require_frame(c, p);
  const int n = c.n();
  const CMat B = cr_detail::coframe(c.kappa, c.mu, p);
  const CMat E = B.inverse();  // columns: dual vectors
  const FormJet kj = c.kappa.jet(p);
  const FormAtPoint dk = d(kj).value();
  auto eval2 = [&](int i, int j) {
    cplx s = 0.0;
    dk.for_each([&](Mask m, cplx v) {
      if (v == cplx{}) return;
      const auto ab = mask_indices(m);
      s += v * (E(ab[0], i) * E(ab[1], j) - E(ab[1], i) * E(ab[0], j));
    });
    return s;
  };
  LeviEntry r;
  r.h = CMat(n, n);
  const cplx I(0, 1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) r.h(a, b) = eval2(1 + a, 1 + n + b) / I;
  const double hn = r.h.norm();
  r.hermitian_defect = (r.h - r.h.adjoint()).norm() / (1.0 + hn);
  const FormAtPoint kv = kj.value();
  r.kappa_dkappa = cr_detail::ratio(wedge(kv, dk).norm(), kv.norm() * (1.0 + dk.norm()));

  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (r.h + r.h.adjoint()));
  r.eigenvalues = es.eigenvalues();
  const double scale = tol * (1.0 + hn);
  for (int a = 0; a < n; ++a) {
    const double e = r.eigenvalues(a);
    if (e > scale) ++r.positive;
    else if (e < -scale) ++r.negative;
    else ++r.zero;
  }
  if (r.zero == n && r.kappa_dkappa < tol) r.verdict = LeviVerdict::Trivial;
  else if (r.zero > 0) r.verdict = LeviVerdict::Degenerate;
  else if (r.positive == n || r.negative == n) r.verdict = LeviVerdict::Pseudoconvex;
  else r.verdict = LeviVerdict::Nondegenerate;
  return r;
}

struct LeviReport {
  std::vector<LeviEntry> entries;
  std::optional<LeviVerdict> verdict;  // empty when verdicts differ across samples
  std::vector<Point> witnesses;        // one point per distinct verdict when mixed
  std::string summary() const { return verdict ? verdict_name(*verdict) : "indefinite over domain"; }
};

inline LeviReport classify(const CRChart& c, const std::vector<Point>& samples, double tol = 1e-8) {
  LeviReport r;
  std::vector<LeviVerdict> seen;
  for (const auto& p : samples) {
    r.entries.push_back(levi_form(c, p, tol));
    const LeviVerdict v = r.entries.back().verdict;
    if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
      seen.push_back(v);
      r.witnesses.push_back(p);
    }
  }
  if (seen.size() == 1) {
    r.verdict = seen.front();
    r.witnesses.clear();
  }
  return r;
}

struct CREquivalence {
  bool equivalent = false;
  cplx a{};        // kappa_b = a kappa_a
  CVec c;          // mu_b^x = c^x kappa_a + b^x_y mu_a^y
  CMat b;
  double residual = 0.0;
  std::string reason;
};

/// Expresses the forms of `second` in the coframe (kappa, mu, conj mu) of `first`.
inline CREquivalence cr_equivalent(const CRChart& first, const CRChart& second, std::span<const double> p,
                                   double tol = 1e-8) {
  if (first.chart->coord_names() != second.chart->coord_names() || first.n() != second.n())
    throw PreconditionError("cr_equivalent: charts differ");
  const int n = first.n();
  const CMat Ba = cr_detail::coframe(first.kappa, first.mu, p);
  const CMat Bb = cr_detail::coframe(second.kappa, second.mu, p);
  Eigen::FullPivLU<CMat> lu(Ba.transpose());
  if (!lu.isInvertible()) throw PreconditionError("cr_equivalent: singular coframe");
  // rows of M: forms of `second` in the coframe of `first`
  const CMat M = lu.solve(Bb.transpose()).transpose();
  CREquivalence r;
  r.a = M(0, 0);
  r.c = M.block(1, 0, n, 1);
  r.b = M.block(1, 1, n, n);
  double off = M.block(0, 1, 1, 2 * n).squaredNorm() + M.block(1, 1 + n, n, n).squaredNorm();
  r.residual = std::sqrt(off) / std::max(M.norm(), 1e-300);
  const double det = std::abs(r.b.determinant());
  if (r.residual >= tol) r.reason = "span mismatch";
  else if (std::abs(r.a.imag()) >= tol * (1.0 + std::abs(r.a))) r.reason = "kappa factor not real";
  else if (std::abs(r.a) < tol) r.reason = "kappa factor vanishes";
  else if (det <= tol) r.reason = "singular b";
  r.equivalent = r.reason.empty();
  return r;
}

/// CR chart of the hypersurface {G = 0} in C^n, pulled back along `param`.
/// The target chart of `param` must declare the complex pairs named in `zs`.
/// kappa = i sum G_{z_k} dz_k; for n = 2, mu = conj(G_{z2}) dz1 - conj(G_{z1}) dz2.
inline CRChart embed_from_defining(const ScalarField& G, const ChartMap& param, const std::vector<Point>& samples,
                                   const std::vector<std::string>& zs = {"z1", "z2"}, double tol = 1e-10) {
  const ChartPtr amb = param.target();
  if (zs.size() != 2) throw PreconditionError("embed_from_defining: two complex coordinates expected");
  std::vector<ComplexPair> pr;
  for (const auto& z : zs) {
    const ComplexPair* q = amb->pair(z);
    if (!q) throw PreconditionError("embed_from_defining: no complex pair " + z);
    pr.push_back(*q);
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Point q = param.image(samples[s]);
    const Jet2 g = G.jet(q);
    double grad = 0.0;
    for (int i = 0; i < amb->dim(); ++i) grad = std::max(grad, std::abs(g.grad[i]));
    if (std::abs(g.value) > 1e-9) throw PreconditionError("embed_from_defining: sample " + std::to_string(s) + " is off the surface");
    if (grad < tol) throw PreconditionError("embed_from_defining: dG = 0 at sample " + std::to_string(s));
    for (int i = 0; i < amb->dim(); ++i)
      if (std::abs(g.grad[i].imag()) > 1e-9 * (1.0 + grad))
        throw PreconditionError("embed_from_defining: G is not real near sample " + std::to_string(s));
  }
  const int dim = amb->dim();
  const cplx I(0, 1);
  auto dwirt = [pr, I](const Jet2& g, int k) {  // order-1 jet of dG/dz_k
    return 0.5 * (partial(g, pr[k].x) - I * partial(g, pr[k].y));
  };
  auto put = [pr, I](FormJet& f, int k, const Jet2& coef) {  // coef dz_k
    f[Mask{1} << pr[k].x] = f[Mask{1} << pr[k].x] + coef;
    f[Mask{1} << pr[k].y] = f[Mask{1} << pr[k].y] + I * coef;
  };
  FormField kap = FormField::from_jet_fn(amb, 1, [G, dim, dwirt, put, I](std::span<const double> q) {
    const Jet2 g = G.jet(q);
    FormJet f(dim, 1);
    put(f, 0, I * dwirt(g, 0));
    put(f, 1, I * dwirt(g, 1));
    return f;
  });
  FormField mu = FormField::from_jet_fn(amb, 1, [G, dim, dwirt, put](std::span<const double> q) {
    const Jet2 g = G.jet(q);
    FormJet f(dim, 1);
    put(f, 0, conj(dwirt(g, 1)));
    put(f, 1, -conj(dwirt(g, 0)));
    return f;
  });
  CRChart c = make_cr_chart(pullback(param, kap), {pullback(param, mu)}, "embedded");
  for (std::size_t s = 0; s < samples.size(); ++s)
    if (kappa_imag(c, samples[s]) > 1e-9)
      throw PreconditionError("embed_from_defining: kappa not real at sample " + std::to_string(s));
  return c;
}

struct CRSubmanifold {
  double residual = 0.0;          // |f* omega|, normalized
  std::optional<CRChart> induced; // (f* kappa, f* mu') when found
  std::string reason;
};

/// f maps a (2m+1)-chart into the chart of c; checks f* omega = 0 and looks for
/// mu' = combinations of the mu^a with f*(kappa ^ mu'^1 ^ .. ^ mu'^m) nonzero.
inline CRSubmanifold cr_submanifold_check(const ChartMap& f, const CRChart& c, std::span<const double> p,
                                          double tol = 1e-8) {
  const int src = f.source()->dim();
  if (src % 2 == 0) throw PreconditionError("cr_submanifold_check: source dimension must be odd");
  const int m = (src - 1) / 2;
  if (m < 1) throw PreconditionError("cr_submanifold_check: need n >= 1 on the source");
  if (m > c.n()) throw PreconditionError("cr_submanifold_check: source larger than target");
  const CMat J = f.jacobian(p);
  Eigen::JacobiSVD<CMat> svd(J);
  const auto sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-10 * std::max(1.0, sv(0)))
    throw PreconditionError("cr_submanifold_check: map is not an immersion at the point");
  const double jn = std::max(1.0, J.norm());
  CRSubmanifold r;
  const Point q = f.image(p);
  FormAtPoint w = c.kappa.at(q);
  for (const auto& mm : c.mu) w = wedge(w, mm.at(q));
  if (m == c.n()) {
    r.residual = 0.0;
  } else {
    FormField wf = c.kappa;
    for (const auto& mm : c.mu) wf = wedge(wf, mm);
    r.residual = cr_detail::ratio(pullback(f, wf, p).norm(), w.norm() * std::pow(jn, c.n() + 1));
  }
  if (r.residual >= tol) {
    r.reason = "f* omega does not vanish";
    return r;
  }
  // candidate coefficient rows for mu'; deterministic list
  std::vector<CMat> cands;
  const int n = c.n();
  if (m == n) {
    cands.push_back(CMat::Identity(n, n));
  } else {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int t = 0; t < 32; ++t) {
      CMat s = CMat::Zero(m, n);
      if (t < n && m == 1) s(0, t) = 1.0;
      else
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) s(i, j) = cplx(N(rng), N(rng));
      cands.push_back(s);
    }
  }
  double best = -1.0;
  CMat pick;
  for (const auto& s : cands) {
    FormAtPoint w2 = c.kappa.at(q);
    for (int i = 0; i < m; ++i) {
      FormAtPoint mi(c.chart->dim(), 1);
      for (int j = 0; j < n; ++j) mi += s(i, j) * c.mu[j].at(q);
      w2 = wedge(w2, mi);
    }
    FormAtPoint pb(src, w2.degree());
    pb.for_each([&](Mask mi, cplx) {
      cplx acc = 0.0;
      const auto cols = mask_indices(mi);
      w2.for_each([&](Mask ma, cplx v) {
        if (v != cplx{}) acc += v * pointalg_detail::minor_det(J, mask_indices(ma), cols);
      });
      pb[mi] = acc;
    });
    const double val = cr_detail::ratio(pb.norm(), w2.norm() * std::pow(jn, m + 1));
    if (val > best) {
      best = val;
      pick = s;
    }
  }
  if (best < 1e-6) {
    r.reason = "no nonvanishing selection of the mu";
    return r;
  }
  std::vector<FormField> mus;
  for (int i = 0; i < m; ++i) {
    FormField mi(c.chart, 1);
    bool first = true;
    for (int j = 0; j < n; ++j) {
      if (pick(i, j) == cplx{}) continue;
      FormField t = ScalarField::constant(c.chart, pick(i, j)) * c.mu[j];
      mi = first ? t : mi + t;
      first = false;
    }
    mus.push_back(pullback(f, mi));
  }
  r.induced = make_cr_chart(pullback(f, c.kappa), std::move(mus), c.name + "/sub");
  return r;
}

}  // namespace robinson
