#pragma once

// Null congruences: geodesy, shear (as a fit of L_k g = rho g + kappa xi + xi kappa),
// twist, expansion; N-structures, the screen complex structure, null Maxwell
// fields, the Bateman transform and lifts of CR charts.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robinson/cr.hpp"
#include "robinson/fields.hpp"

namespace robinson {

namespace optics_detail {

inline CVec values(const std::vector<Jet2>& j) {
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].value;
  return v;
}

inline double ratio(double num, double den) { return num / std::max(den, 1e-300); }

/// |a ^ b| for two covectors given by components.
inline double wedge_norm(const CVec& a, const CVec& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j) s += std::norm(a(i) * b(j) - a(j) * b(i));
  return std::sqrt(s);
}

inline Jet2 dot(const std::vector<Jet2>& gj, const std::vector<Jet2>& a, const std::vector<Jet2>& b) {
  const int n = static_cast<int>(a.size());
  Jet2 s = Jet2::constant(a[0].dim, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s = s + gj[i * n + j] * a[i] * b[j];
  return s;
}

}  // namespace optics_detail

/// |g(k,k)| / (|k|^2 (1 + |g|)).
inline double null_residual(const VectorField& k, const MetricField& g, std::span<const double> p) {
  const CVec kv = k.at(p);
  const CMat gm = g.at(p).g;
  const cplx q = kv.transpose() * gm * kv;
  return optics_detail::ratio(std::abs(q), kv.squaredNorm() * (1.0 + gm.norm()));
}

inline void require_null(const VectorField& k, const MetricField& g, std::span<const double> p, double tol = 1e-10) {
  if (!(null_residual(k, g, p) < tol)) throw PreconditionError("vector field is not null at the point");
}

/// |kappa ^ L(k)kappa| / (|kappa| (1 + |L(k)kappa|)), L(k)kappa_n = (L_k g)_{mn} k^m.
inline double geodesic_residual(const VectorField& k, const MetricField& g, std::span<const double> p) {
  require_null(k, g, p);
  const CVec kv = k.at(p);
  const CVec kap = g.at(p).g * kv;
  const CVec Lk = lie_metric(k, g, p) * kv;
  return optics_detail::ratio(optics_detail::wedge_norm(kap, Lk), kap.norm() * (1.0 + Lk.norm()));
}

struct ShearFit {
  double residual = 0.0;
  cplx rho{};
  CVec xi;
};

/// Least squares for L_k g = rho g + kappa (x) xi + xi (x) kappa over the
/// upper triangle, off-diagonal rows weighted by sqrt 2; minimum-norm solution.
inline ShearFit shear_residual(const VectorField& k, const MetricField& g, std::span<const double> p) {
  require_null(k, g, p);
  const int n = g.dim();
  const CMat gm = g.at(p).g;
  const CVec kap = gm * k.at(p);
  const CMat L = lie_metric(k, g, p);
  const int rows = n * (n + 1) / 2;
  CMat A = CMat::Zero(rows, n + 1);
  CVec b(rows);
  int r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++r) {
      const double w = i == j ? 1.0 : std::sqrt(2.0);
      A(r, 0) = w * gm(i, j);
      A(r, 1 + j) += w * kap(i);
      A(r, 1 + i) += w * kap(j);
      b(r) = w * L(i, j);
    }
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(A);
  cod.setThreshold(1e-13);
  const CVec x = cod.solve(b);
  ShearFit f;
  f.rho = x(0);
  f.xi = x.tail(n);
  CMat res = L - f.rho * gm - kap * f.xi.transpose() - f.xi * kap.transpose();
  f.residual = res.norm() / (1.0 + L.norm());
  return f;
}

/// |d kappa ^ kappa| / (|kappa| (1 + |d kappa|)), kappa = g(k).
inline double twist(const VectorField& k, const MetricField& g, std::span<const double> p) {
  require_null(k, g, p);
  const FormJet kj = one_form_jet(lower_jet(k, g, p));
  const FormAtPoint kv = kj.value();
  const FormAtPoint dk = d(kj).value();
  return optics_detail::ratio(wedge(dk, kv).norm(), kv.norm() * (1.0 + dk.norm()));
}

/// div k. Only zero / nonzero is used as a verdict.
inline double expansion(const VectorField& k, const MetricField& g, std::span<const double> p) {
  return divergence(k, g, p).real();
}

struct CongruenceSample {
  double geodesic = 0.0, shear = 0.0, twist = 0.0, expansion = 0.0;
  cplx rho{};
  CVec xi;
};

struct CongruenceReport {
  std::vector<CongruenceSample> samples;
  double max_geodesic = 0.0, max_shear = 0.0;
  double min_twist = 0.0, max_twist = 0.0;
  double min_abs_expansion = 0.0, max_abs_expansion = 0.0;
  double tol = 1e-8;

  bool geodesic() const { return max_geodesic < tol; }
  /// Shear is only meaningful on geodesic congruences.
  std::optional<bool> shear_free() const {
    if (!geodesic()) return std::nullopt;
    return max_shear < tol;
  }
  bool sng() const { return geodesic() && max_shear < tol; }
  /// "twisting", "twist-free" or "mixed"; same for expansion.
  std::string twist_verdict(double nonzero = 1e-8) const {
    if (min_twist > nonzero) return "twisting";
    if (max_twist < tol) return "twist-free";
    return "mixed";
  }
  std::string expansion_verdict(double nonzero = 1e-8) const {
    if (min_abs_expansion > nonzero) return "expanding";
    if (max_abs_expansion < tol) return "expansion-free";
    return "mixed";
  }
};

inline CongruenceReport analyze_congruence(const VectorField& k, const MetricField& g,
                                           const std::vector<Point>& points, double tol = 1e-8) {
  CongruenceReport r;
  r.tol = tol;
  bool first = true;
  for (const auto& p : points) {
    CongruenceSample s;
    s.geodesic = geodesic_residual(k, g, p);
    const ShearFit f = shear_residual(k, g, p);
    s.shear = f.residual;
    s.rho = f.rho;
    s.xi = f.xi;
    s.twist = twist(k, g, p);
    s.expansion = expansion(k, g, p);
    const double e = std::abs(s.expansion);
    if (first) {
      r.min_twist = s.twist;
      r.min_abs_expansion = e;
      first = false;
    }
    r.max_geodesic = std::max(r.max_geodesic, s.geodesic);
    r.max_shear = std::max(r.max_shear, s.shear);
    r.min_twist = std::min(r.min_twist, s.twist);
    r.max_twist = std::max(r.max_twist, s.twist);
    r.min_abs_expansion = std::min(r.min_abs_expansion, e);
    r.max_abs_expansion = std::max(r.max_abs_expansion, e);
    r.samples.push_back(std::move(s));
  }
  return r;
}

// ---------------------------------------------------------------------------
// N-structures

struct NStructureSpec {
  FormField kappa;
  std::vector<FormField> mu;

  FormField omega() const {
    FormField w = kappa;
    for (const auto& m : mu) w = wedge(w, m);
    return w;
  }
};

/// Norm of kappa ^ mu ^ .. ^ conj(mu) ^ .. in Euclidean coordinates, over the
/// product of the factor norms (a Gram determinant); in [0, 1].
inline double frame_measure(const NStructureSpec& ns, std::span<const double> p) {
  const CMat B = cr_detail::coframe(ns.kappa, ns.mu, p);
  double prod = 1.0;
  for (int i = 0; i < B.rows(); ++i) prod *= B.row(i).squaredNorm();
  const CMat gram = B * B.adjoint();
  return std::sqrt(optics_detail::ratio(std::abs(gram.determinant()), prod));
}

/// Residuals |d kappa ^ omega| and |d mu^a ^ omega|, normalized.
inline std::vector<double> nstructure_integrability(const NStructureSpec& ns, std::span<const double> p,
                                                    double frame_tol = 1e-10) {
  if (!(frame_measure(ns, p) > frame_tol))
    throw PreconditionError("N-structure: frame condition fails at the point");
  return integrability_residuals(ns.kappa, ns.mu, p);
}

// ---------------------------------------------------------------------------
// Screen space K^perp / K

namespace optics_detail {

struct ScreenJets {
  std::vector<Jet2> kappa, s1, s2;  // s1, s2: g-orthonormal, in ker kappa, oriented
};

/// Jets of an oriented orthonormal frame of a complement of k in ker kappa. The
/// discrete choices (pivot component, order of candidates) are made at p and
/// held fixed, so the jets describe one smooth frame near p.
inline ScreenJets screen_jets(const VectorField& k, const MetricField& g, std::span<const double> p) {
  const int n = g.dim();
  const auto gj = g.jets(p);
  const auto kj = k.jet(p);
  ScreenJets r;
  r.kappa = lower_jet(k, g, p);
  int b = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(r.kappa[i].value) > std::abs(r.kappa[b].value)) b = i;
  if (std::abs(r.kappa[b].value) == 0.0) throw PreconditionError("screen: k vanishes at the point");
  std::vector<std::vector<Jet2>> cand;
  for (int a = 0; a < n; ++a) {
    if (a == b) continue;
    std::vector<Jet2> v(n, Jet2::constant(n, 0.0));
    v[a] = Jet2::constant(n, 1.0);
    v[b] = -(r.kappa[a] / r.kappa[b]);
    cand.push_back(std::move(v));
  }
  auto pick = [&](const std::vector<std::vector<Jet2>>& cs) {
    int best = -1;
    double bv = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double q = dot(gj, cs[i], cs[i]).value.real();
      if (q > bv) {
        bv = q;
        best = static_cast<int>(i);
      }
    }
    if (best < 0 || bv < 1e-14) throw PreconditionError("screen: degenerate quotient");
    return best;
  };
  auto normalize = [&](std::vector<Jet2> v) {
    const Jet2 s = sqrt(dot(gj, v, v));
    for (auto& c : v) c = c / s;
    return v;
  };
  const int i1 = pick(cand);
  r.s1 = normalize(cand[i1]);
  std::vector<std::vector<Jet2>> rest;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (static_cast<int>(i) == i1) continue;
    auto v = cand[i];
    const Jet2 c = dot(gj, v, r.s1);
    for (int t = 0; t < n; ++t) v[t] = v[t] - c * r.s1[t];
    rest.push_back(std::move(v));
  }
  r.s2 = normalize(rest[pick(rest)]);
  if (n == 4) {
    // orientation: det[k, t, s1, s2] > 0 with kappa(t) > 0, t along the pivot axis
    Eigen::Matrix4d M;
    for (int i = 0; i < 4; ++i) {
      M(i, 0) = kj[i].value.real();
      M(i, 1) = i == b ? (r.kappa[b].value.real() > 0 ? 1.0 : -1.0) : 0.0;
      M(i, 2) = r.s1[i].value.real();
      M(i, 3) = r.s2[i].value.real();
    }
    if (M.determinant() < 0)
      for (auto& c : r.s2) c = -c;
  }
  return r;
}

}  // namespace optics_detail

struct ScreenStructure {
  Eigen::MatrixXd basis;  // columns: a (non-orthonormal) basis of a complement of k in K^perp
  Eigen::Matrix2d h;      // induced metric in that basis
  Eigen::Matrix2d J;      // complex structure in that basis
  double j_squared = 0.0;   // |J^2 + 1|
  double orthogonal = 0.0;  // |J^T h J - h| / |h|
  double min_eigenvalue = 0.0;
};

inline ScreenStructure screen_structure(const VectorField& k, const MetricField& g, std::span<const double> p) {
  require_null(k, g, p);
  if (g.dim() != 4) throw PreconditionError("screen_structure: dimension four only");
  const auto sj = optics_detail::screen_jets(k, g, p);
  const CMat gm = g.at(p).g;
  Eigen::MatrixXd E(4, 2);
  for (int i = 0; i < 4; ++i) {
    E(i, 0) = sj.s1[i].value.real();
    E(i, 1) = sj.s2[i].value.real();
  }
  // a skewed basis, so that h and J are not trivially the identity and rotation
  Eigen::Matrix2d T;
  T << 1.0, 0.5, 0.0, 1.3;
  ScreenStructure s;
  s.basis = E * T;
  s.h = s.basis.transpose() * gm.real() * s.basis;
  Eigen::Matrix2d J0;
  J0 << 0.0, -1.0, 1.0, 0.0;
  s.J = T.inverse() * J0 * T;
  s.j_squared = (s.J * s.J + Eigen::Matrix2d::Identity()).norm();
  s.orthogonal = (s.J.transpose() * s.h * s.J - s.h).norm() / s.h.norm();
  s.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(s.h).eigenvalues()(0);
  return s;
}

/// N^0 = span{g(k), g(e1 - i e2)} for the oriented screen frame (e1, e2).
inline NStructureSpec screen_nstructure(const VectorField& k, const MetricField& g) {
  const int n = g.dim();
  VectorField kk = k;
  MetricField gg = g;
  FormField kap = FormField::from_jet_fn(g.chart_ptr(), 1, [kk, gg](std::span<const double> p) {
    return one_form_jet(lower_jet(kk, gg, p));
  });
  FormField mu = FormField::from_jet_fn(g.chart_ptr(), 1, [kk, gg, n](std::span<const double> p) {
    const auto sj = optics_detail::screen_jets(kk, gg, p);
    const auto gj = gg.jets(p);
    std::vector<Jet2> m(n, Jet2::constant(n, 0.0));
    const cplx I(0, 1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) m[b] = m[b] + gj[a * n + b] * (sj.s1[a] - I * sj.s2[a]);
    return one_form_jet(m);
  });
  return {kap, {mu}};
}

// ---------------------------------------------------------------------------
// Null Maxwell fields

struct MaxwellResiduals {
  double self_dual = 0.0;  // |*F - iF| / (|*F| + |F|)
  double closed = 0.0;     // |dF| / (|F| + |dF components|)
  double null = 0.0;       // |kappa ^ F| / (|kappa| |F|)
};

inline MaxwellResiduals verify_null_maxwell(const FormField& F, const FormField& kappa, const MetricField& g,
                                            int orientation, std::span<const double> p) {
  if (F.degree() != 2) throw PreconditionError("verify_null_maxwell: F must be a 2-form");
  const FormJet fj = F.jet(p);
  const FormAtPoint fv = fj.value();
  const FormAtPoint star = hodge(fv, g.at(p), orientation);
  MaxwellResiduals r;
  r.self_dual = optics_detail::ratio((star - cplx(0, 1) * fv).norm(), star.norm() + fv.norm());
  double grad = 0.0;
  fj.for_each([&](Mask, const Jet2& c) {
    for (int i = 0; i < c.dim; ++i) grad += std::norm(c.grad[i]);
  });
  r.closed = optics_detail::ratio(d(fj).value().norm(), fv.norm() + std::sqrt(grad));
  const FormAtPoint kv = kappa.at(p);
  r.null = optics_detail::ratio(wedge(kv, fv).norm(), kv.norm() * fv.norm());
  return r;
}

// ---------------------------------------------------------------------------
// Bateman transform and lifts

namespace optics_detail {

/// k _| lambda for g = kappa lambda + (terms killing k), from g(k, t) = kappa(t) lambda(k) / 2.
inline cplx k_lambda(const VectorField& k, const MetricField& g, const FormField& kappa, std::span<const double> p) {
  const CVec kv = k.at(p);
  const CVec kap = cr_detail::components(kappa.at(p));
  int b = 0;
  for (int i = 1; i < kap.size(); ++i)
    if (std::abs(kap(i)) > std::abs(kap(b))) b = i;
  const cplx gkt = (g.at(p).g * kv)(b);
  return 2.0 * gkt / kap(b);
}

}  // namespace optics_detail

/// g' = rho (g + kappa xi), the product symmetrized.
inline MetricField bateman_transform(const MetricField& g, const FormField& kappa, const ScalarField& rho,
                                     const FormField& xi, const VectorField& k,
                                     const std::vector<Point>& samples, double tol = 1e-10) {
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& p = samples[s];
    const cplx kl = optics_detail::k_lambda(k, g, kappa, p);
    const cplx kx = pair(xi.at(p), k.at(p));
    if (std::abs(kl + kx) < tol * (1.0 + std::abs(kl) + std::abs(kx)))
      throw PreconditionError("bateman_transform: k _| (lambda + xi) vanishes at sample " + std::to_string(s));
  }
  const int n = g.dim();
  MetricField out(g.chart_ptr(), g.signature());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField gij = g(i, j);
      out.set(i, j, ScalarField(g.chart_ptr(), [gij, kappa, xi, rho, i, j](std::span<const double> p) {
                const FormJet a = kappa.jet(p), b = xi.jet(p);
                const Mask mi = Mask{1} << i, mj = Mask{1} << j;
                const Jet2 sym = 0.5 * (a[mi] * b[mj] + a[mj] * b[mi]);
                return rho.jet(p) * (gij.jet(p) + sym);
              }));
    }
  return out;
}

/// sigma_ab in d kappa = kappa ^ rho + i sigma_ab mu^a ^ conj(mu^b), read off on
/// the frame dual to (kappa, transversal, mu, conj mu).
inline CMat dkappa_sigma(const FormField& kappa, const std::vector<FormField>& mu, const FormField& transversal,
                         std::span<const double> p) {
  const int n = static_cast<int>(mu.size());
  const int dim = kappa.chart().dim();
  if (dim != 2 * n + 2) throw PreconditionError("dkappa_sigma: dimension must be 2n+2");
  CMat B(dim, dim);
  const CMat cf = cr_detail::coframe(kappa, mu, p);
  B.row(0) = cf.row(0);
  B.row(1) = cr_detail::components(transversal.at(p)).transpose();
  B.block(2, 0, 2 * n, dim) = cf.block(1, 0, 2 * n, dim);
  Eigen::FullPivLU<CMat> lu(B);
  if (!lu.isInvertible()) throw PreconditionError("dkappa_sigma: singular coframe");
  const CMat E = lu.inverse();
  const FormAtPoint dk = d(kappa.jet(p)).value();
  CMat s(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cplx v = 0.0;
      dk.for_each([&](Mask m, cplx c) {
        if (c == cplx{}) return;
        const auto ij = mask_indices(m);
        v += c * (E(ij[0], 2 + a) * E(ij[1], 2 + n + b) - E(ij[1], 2 + a) * E(ij[0], 2 + n + b));
      });
      s(a, b) = v / cplx(0, 1);
    }
  return s;
}

struct Lift {
  ChartPtr chart;
  MetricField g;
  VectorField k;
  FormField kappa;
  std::vector<FormField> mu;
};

namespace optics_detail {

inline Mask shift_mask(Mask m, int at) {
  const Mask low = m & ((Mask{1} << at) - 1);
  return low | ((m & ~((Mask{1} << at) - 1)) << 1);
}

inline ScalarField extend_scalar(const ScalarField& f, const ChartPtr& lifted, int at) {
  if (f.expression()) return ScalarField(f.expression()->rebind(lifted));
  return ScalarField(lifted, [f, at](std::span<const double> p) {
    Point q(p.begin(), p.end());
    q.erase(q.begin() + at);
    const Jet2 j = f.jet(q);
    Jet2 r = Jet2::constant(static_cast<int>(p.size()), j.value);
    r.order = j.order;
    const int n = static_cast<int>(p.size());
    auto src = [at](int i) { return i < at ? i : i - 1; };
    for (int i = 0; i < n; ++i) {
      if (i == at) continue;
      r.grad[i] = j.grad[src(i)];
      for (int l = 0; l < n; ++l)
        if (l != at) r.dd_ref(i, l) = j.dd(src(i), src(l));
    }
    return r;
  });
}

inline FormField extend_form(const FormField& a, const ChartPtr& lifted, int at) {
  FormField r(lifted, a.degree());
  for (const auto& [m, f] : a.components()) r.set(shift_mask(m, at), extend_scalar(f, lifted, at));
  return r;
}

}  // namespace optics_detail

/// Chart of M x R: the coordinate `vname` is inserted at position `at`.
inline ChartPtr lifted_chart(const Chart& base, const std::string& vname = "v", int at = 1) {
  std::vector<std::string> names = base.coord_names();
  names.insert(names.begin() + at, vname);
  std::vector<ComplexPair> pairs = base.complex_pairs();
  for (auto& pr : pairs) {
    if (pr.x >= at) ++pr.x;
    if (pr.y >= at) ++pr.y;
  }
  return std::make_shared<const Chart>(base.name() + "xR", std::move(names), std::move(pairs));
}

/// g = kappa lambda + sum g_ab mu^a conj(mu^b) on `lifted` (see lifted_chart),
/// k = d/dv. `coeffs` is n x n row-major, Hermitean and positive at samples.
inline Lift lift_cr(const CRChart& cr, const ChartPtr& lifted, int at, const FormField& lambda,
                    const std::vector<ScalarField>& coeffs, const std::vector<Point>& samples) {
  const int n = cr.n();
  if (static_cast<int>(coeffs.size()) != n * n) throw PreconditionError("lift_cr: need n*n coefficients");
  Lift L;
  L.chart = lifted;
  L.kappa = optics_detail::extend_form(cr.kappa, lifted, at);
  for (const auto& m : cr.mu) L.mu.push_back(optics_detail::extend_form(m, lifted, at));
  std::vector<ScalarField> kc(lifted->dim(), ScalarField::constant(lifted, 0.0));
  kc[at] = ScalarField::constant(lifted, 1.0);
  L.k = VectorField(lifted, kc);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& p = samples[s];
    const cplx kl = lambda.at(p)[Mask{1} << at];
    if (std::abs(kl) < 1e-10) throw PreconditionError("lift_cr: k _| lambda vanishes at sample " + std::to_string(s));
    CMat h(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) h(a, b) = coeffs[a * n + b].value(p);
    if ((h - h.adjoint()).norm() > 1e-10 * (1.0 + h.norm()))
      throw PreconditionError("lift_cr: coefficients not Hermitean at sample " + std::to_string(s));
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
    if (es.eigenvalues()(0) <= 0.0)
      throw PreconditionError("lift_cr: coefficients not positive at sample " + std::to_string(s));
  }
  std::vector<MetricTerm> terms = {{ScalarField::constant(lifted, 1.0), L.kappa, lambda}};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) terms.push_back({coeffs[a * n + b], L.mu[a], conj(L.mu[b])});
  L.g = metric_from_terms(lifted, std::move(terms));
  return L;
}

}  // namespace robinson
