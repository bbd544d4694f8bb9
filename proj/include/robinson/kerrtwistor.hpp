#pragma once

// Kerr congruences in Minkowski space (u, v, w) with g = du dv + dw dwbar,
// the twistor bundle over it and the null-line / null-twistor correspondence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robinson/cr.hpp"
#include "robinson/curvature.hpp"
#include "robinson/fields.hpp"
#include "robinson/optics.hpp"

namespace robinson {

using C3 = std::array<cplx, 3>;

/// Argument chart of H: z_k = a_k + i b_k.
inline ChartPtr kerr_argument_chart() {
  static const ChartPtr c = Chart::make("kerr_args", {"a1", "b1", "a2", "b2", "a3", "b3"},
                                       {{"z1", "a1", "b1"}, {"z2", "a2", "b2"}, {"z3", "a3", "b3"}});
  return c;
}

/// A holomorphic function H(z1, z2, z3).
class KerrFunction {
 public:
  explicit KerrFunction(Expression h) : h_(std::move(h)) {
    const auto& c = h_.chart();
    if (c.dim() != 6 || !c.pair("z1") || !c.pair("z2") || !c.pair("z3"))
      throw PreconditionError("Kerr function must be an expression in z1, z2, z3");
  }
  static KerrFunction parse(std::string_view text, const std::map<std::string, cplx>& params = {}) {
    return KerrFunction(robinson::parse(text, kerr_argument_chart(), params));
  }

  const Expression& expression() const { return h_; }

  Point argument_point(const C3& z) const {
    Point q(6);
    for (int k = 0; k < 3; ++k) {
      const ComplexPair* pr = h_.chart().pair("z" + std::to_string(k + 1));
      q[pr->x] = z[k].real();
      q[pr->y] = z[k].imag();
    }
    return q;
  }

  Jet2 jet(const C3& z) const { return h_.jet(argument_point(z)); }
  cplx value(const C3& z) const { return jet(z).value; }

  /// H_1, H_2, H_3; throws if a dzbar_k derivative is present.
  C3 partials(const C3& z) const {
    const Jet2 j = jet(z);
    C3 out{};
    for (int k = 0; k < 3; ++k) {
      const auto w = wirtinger(j, *h_.chart().pair("z" + std::to_string(k + 1)));
      if (std::abs(w.dwbar) > 1e-8 * (1.0 + std::abs(w.dw)))
        throw PreconditionError("Kerr function is not holomorphic in z" + std::to_string(k + 1));
      out[k] = w.dw;
    }
    return out;
  }

 private:
  Expression h_;
};

/// Positions of u, v and the pair w in a chart carrying Minkowski coordinates.
struct MinkIndex {
  int u = -1, v = -1, x = -1, y = -1;

  static MinkIndex of(const Chart& c) {
    MinkIndex m;
    const auto u = c.index_of("u"), v = c.index_of("v");
    const ComplexPair* w = c.pair("w");
    if (!u || !v || !w) throw PreconditionError("chart '" + c.name() + "' lacks coordinates u, v and pair w");
    m.u = *u;
    m.v = *v;
    m.x = w->x;
    m.y = w->y;
    return m;
  }
  double U(std::span<const double> p) const { return p[u]; }
  double V(std::span<const double> p) const { return p[v]; }
  cplx W(std::span<const double> p) const { return {p[x], p[y]}; }
};

/// The three Kerr arguments (u - z wbar, w + z v, z).
inline C3 kerr_arguments(double u, double v, cplx w, cplx z) { return {u - z * std::conj(w), w + z * v, z}; }

struct KerrRoot {
  bool ok = false;
  cplx z;
  cplx F;
  cplx dF;
  int iterations = 0;
  std::string reason;
};

/// Newton on F(z) = H(u - z wbar, w + z v, z), F' = -wbar H1 + v H2 + H3.
inline KerrRoot try_kerr_solve(const KerrFunction& H, double u, double v, cplx w, cplx seed,
                               int max_iter = 50) {
  KerrRoot r;
  r.z = seed;
  auto eval = [&](cplx z) {
    const C3 a = kerr_arguments(u, v, w, z);
    const C3 d = H.partials(a);
    r.F = H.value(a);
    r.dF = -std::conj(w) * d[0] + v * d[1] + d[2];
  };
  eval(r.z);
  for (r.iterations = 0; r.iterations <= max_iter; ++r.iterations) {
    if (std::abs(r.dF) < 1e-10) {
      r.reason = "derivative collapse";
      return r;
    }
    if (std::abs(r.F) < 1e-12) {
      r.ok = true;
      return r;
    }
    if (r.iterations == max_iter) break;
    r.z -= r.F / r.dF;
    if (!std::isfinite(r.z.real()) || !std::isfinite(r.z.imag())) {
      r.reason = "non-finite iterate";
      return r;
    }
    eval(r.z);
  }
  r.reason = "no convergence after " + std::to_string(max_iter) + " iterations";
  return r;
}

inline std::string describe(const KerrRoot& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, " (last iterate z = %.12g%+.12gi, |F| = %.3g, |F'| = %.3g)", r.z.real(),
                r.z.imag(), std::abs(r.F), std::abs(r.dF));
  return r.reason + buf;
}

inline cplx kerr_solve(const KerrFunction& H, double u, double v, cplx w, cplx seed) {
  const KerrRoot r = try_kerr_solve(H, u, v, w, seed);
  if (!r.ok) throw SolverError("kerr_solve: " + describe(r));
  return r.z;
}

/// Roots of F when it is a polynomial in z, and which of them `z` is.
struct KerrBranch {
  bool polynomial = false;
  int degree = 0;
  std::vector<cplx> roots;
  int index = -1;
  double distance = 0.0;
};

inline KerrBranch kerr_branch(const KerrFunction& H, double u, double v, cplx w, cplx z, int max_degree = 8) {
  KerrBranch b;
  const int N = 32;
  const double radius = 1.0 + std::abs(z);
  std::vector<cplx> f(N);
  const double pi = std::acos(-1.0);
  for (int j = 0; j < N; ++j) f[j] = H.value(kerr_arguments(u, v, w, std::polar(radius, 2 * pi * j / N)));
  std::vector<cplx> c(N);
  double scale = 0.0;
  for (int k = 0; k < N; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < N; ++j) s += f[j] * std::polar(1.0, -2 * pi * j * k / N);
    c[k] = s / double(N) / std::pow(radius, k);
    scale = std::max(scale, std::abs(c[k]) * std::pow(radius, k));
  }
  int deg = 0;
  for (int k = 0; k < N; ++k)
    if (std::abs(c[k]) * std::pow(radius, k) > 1e-10 * scale) deg = k;
  if (deg > max_degree || deg == 0) return b;
  b.polynomial = true;
  b.degree = deg;
  CMat comp = CMat::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<CMat> es(comp);
  for (int i = 0; i < deg; ++i) b.roots.push_back(es.eigenvalues()(i));
  b.distance = 1e300;
  for (int i = 0; i < deg; ++i)
    if (std::abs(b.roots[i] - z) < b.distance) {
      b.distance = std::abs(b.roots[i] - z);
      b.index = i;
    }
  return b;
}

// ---------------------------------------------------------------------------
// Fields k_z, kappa_z, mu_z, lambda_z for a function z on Minkowski space.

struct KerrForms {
  ChartPtr chart;
  ScalarField z;
  VectorField k;
  FormField kappa, mu, lambda;

  NStructureSpec nstructure() const { return {kappa, {mu}}; }
};

/// k_z = d_v - z d_w - zbar d_wbar - z zbar d_u, kappa_z = du - z dwbar - zbar dw - z zbar dv,
/// mu_z = dw + z dv, lambda_z = dv.
inline KerrForms kerr_forms(const ChartPtr& chart, const ScalarField& z) {
  const MinkIndex mi = MinkIndex::of(*chart);
  const int n = chart->dim();
  auto cst = [&](cplx c) { return ScalarField::constant(chart, c); };
  const ScalarField zb = conj(z);
  const ScalarField zzb = z * zb;
  const ScalarField neg = cst(-1.0);
  KerrForms f;
  f.chart = chart;
  f.z = z;
  std::vector<ScalarField> kc(n, cst(0.0));
  kc[mi.u] = neg * zzb;
  kc[mi.v] = cst(1.0);
  kc[mi.x] = cst(-0.5) * (z + zb);
  kc[mi.y] = cst(cplx(0, 0.5)) * (z + neg * zb);
  f.k = VectorField(chart, kc);
  const FormField du = coordinate_differential(chart, mi.u), dv = coordinate_differential(chart, mi.v);
  const FormField dw = complex_differential(chart, "w"), dwb = complex_differential(chart, "w", true);
  f.kappa = du + (neg * z) * dwb + (neg * zb) * dw + (neg * zzb) * dv;
  f.mu = dw + z * dv;
  f.lambda = dv;
  return f;
}

namespace kerr_detail {

/// Interleaved-bit (Morton) order of points normalized to their bounding box.
inline std::vector<std::size_t> space_filling_order(const std::vector<Point>& pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (pts.empty()) return idx;
  const std::size_t n = pts[0].size();
  std::vector<double> lo(n, 1e300), hi(n, -1e300);
  for (const auto& p : pts)
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  const int bits = static_cast<int>(60 / std::max<std::size_t>(n, 1));
  std::vector<std::uint64_t> key(pts.size(), 0);
  for (std::size_t s = 0; s < pts.size(); ++s) {
    std::vector<std::uint64_t> q(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = hi[i] > lo[i] ? (pts[s][i] - lo[i]) / (hi[i] - lo[i]) : 0.0;
      q[i] = static_cast<std::uint64_t>(t * double((std::uint64_t{1} << bits) - 1));
    }
    for (int b = bits - 1; b >= 0; --b)
      for (std::size_t i = 0; i < n; ++i) key[s] = (key[s] << 1) | ((q[i] >> b) & 1);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return idx;
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct RootCache {
  std::vector<Point> points;
  std::vector<cplx> roots;
  std::mutex m;
  Point last_p;
  Jet2 last_jet;
  bool has_last = false;

  cplx seed_for(std::span<const double> p) const {
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = dist2(points[i], p);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return roots[best];
  }
};

/// Jet of z(x) solving H(u - z wbar, w + z v, z) = 0 near the root z0 at p,
/// by Newton steps in jet arithmetic with the frozen derivative F'(z0).
inline Jet2 root_jet(const KerrFunction& H, const MinkIndex& mi, std::span<const double> p, cplx z0, cplx dF0) {
  const int n = static_cast<int>(p.size());
  auto coord = [&](int i) {
    Jet2 j = Jet2::constant(n, p[i]);
    j.grad[i] = 1.0;
    return j;
  };
  const Jet2 u = coord(mi.u), v = coord(mi.v);
  const Jet2 w = coord(mi.x) + cplx(0, 1) * coord(mi.y);
  const Jet2 wb = conj(w);
  Jet2 z = Jet2::constant(n, z0);
  for (int step = 0; step < 3; ++step) {
    const std::array<Jet2, 3> args = {u - z * wb, w + z * v, z};
    std::vector<Jet2> inner;
    for (const auto& a : args) {
      inner.push_back(re(a));
      inner.push_back(im(a));
    }
    C3 av{args[0].value, args[1].value, args[2].value};
    const Jet2 F = compose(H.jet(av), inner);
    z = z - F / dF0;
  }
  z.value = z0;
  return z;
}

}  // namespace kerr_detail

struct KerrFailure {
  Point point;
  std::string reason;
};

struct KerrField {
  KerrFunction H;
  KerrForms forms;
  std::vector<Point> points;  // solved samples in continuation order
  std::vector<cplx> roots;
  std::vector<KerrFailure> failures;
  double max_residual = 0.0;  // max |F| over cached points
  double min_derivative = 0.0;  // min |F'| over cached points
};

/// Solves at every sample (continuation along a space-filling order, each point
/// seeded from its nearest solved neighbour) and returns z as a field whose
/// value at any point is the root reached from the nearest cached sample.
inline KerrField kerr_congruence(const ChartPtr& chart, const KerrFunction& H, const std::vector<Point>& samples,
                                 cplx seed) {
  const MinkIndex mi = MinkIndex::of(*chart);
  auto cache = std::make_shared<kerr_detail::RootCache>();
  KerrField out{H, {}, {}, {}, {}, 0.0, 1e300};
  for (std::size_t s : kerr_detail::space_filling_order(samples)) {
    const Point& p = samples[s];
    const cplx z0 = cache->points.empty() ? seed : cache->seed_for(p);
    const KerrRoot r = try_kerr_solve(H, mi.U(p), mi.V(p), mi.W(p), z0);
    if (!r.ok) {
      out.failures.push_back({p, describe(r)});
      continue;
    }
    cache->points.push_back(p);
    cache->roots.push_back(r.z);
    out.max_residual = std::max(out.max_residual, std::abs(r.F));
    out.min_derivative = std::min(out.min_derivative, std::abs(r.dF));
  }
  if (cache->points.empty()) throw SolverError("kerr_congruence: no sample could be solved");
  out.points = cache->points;
  out.roots = cache->roots;
  ScalarField z(chart, [cache, H, mi](std::span<const double> p) {
    {
      std::lock_guard<std::mutex> lock(cache->m);
      if (cache->has_last && std::equal(p.begin(), p.end(), cache->last_p.begin(), cache->last_p.end()))
        return cache->last_jet;
    }
    const KerrRoot r = try_kerr_solve(H, mi.U(p), mi.V(p), mi.W(p), cache->seed_for(p));
    if (!r.ok) throw SolverError("Kerr field: " + describe(r));
    const Jet2 j = kerr_detail::root_jet(H, mi, p, r.z, r.dF);
    std::lock_guard<std::mutex> lock(cache->m);
    cache->last_p.assign(p.begin(), p.end());
    cache->last_jet = j;
    cache->has_last = true;
    return j;
  }, "z[" + H.expression().to_string() + "]");
  out.forms = kerr_forms(chart, z);
  return out;
}

// ---------------------------------------------------------------------------
// Descent to the leaf space.

struct Descent {
  double u_z;
  cplx w_z;
};

/// u_z = u - z wbar - zbar w - z zbar v, w_z = w + z v.
inline Descent descend(double u, double v, cplx w, cplx z) {
  const cplx uz = u - z * std::conj(w) - std::conj(z) * w - z * std::conj(z) * v;
  return {uz.real(), w + z * v};
}

struct DescentFields {
  ScalarField u_z, w_z;
};

inline DescentFields descent_fields(const ChartPtr& chart, const ScalarField& z) {
  const MinkIndex mi = MinkIndex::of(*chart);
  ScalarField zc = z;
  ScalarField uz(chart, [zc, mi](std::span<const double> p) {
    const int n = static_cast<int>(p.size());
    Jet2 u = Jet2::constant(n, p[mi.u]), v = Jet2::constant(n, p[mi.v]);
    u.grad[mi.u] = 1.0;
    v.grad[mi.v] = 1.0;
    Jet2 w = Jet2::constant(n, cplx(p[mi.x], p[mi.y]));
    w.grad[mi.x] = 1.0;
    w.grad[mi.y] = cplx(0, 1);
    const Jet2 zj = zc.jet(p), zb = conj(zj);
    return u - zj * conj(w) - zb * w - zj * zb * v;
  });
  ScalarField wz(chart, [zc, mi](std::span<const double> p) {
    const int n = static_cast<int>(p.size());
    Jet2 v = Jet2::constant(n, p[mi.v]);
    v.grad[mi.v] = 1.0;
    Jet2 w = Jet2::constant(n, cplx(p[mi.x], p[mi.y]));
    w.grad[mi.x] = 1.0;
    w.grad[mi.y] = cplx(0, 1);
    return w + zc.jet(p) * v;
  });
  return {uz, wz};
}

/// |k(f)| at p: the directional derivative of a scalar field along a vector field.
inline double directional_derivative(const VectorField& k, const ScalarField& f, std::span<const double> p) {
  const CVec kv = k.at(p);
  const Jet2 j = f.jet(p);
  cplx s = 0.0;
  for (int i = 0; i < kv.size(); ++i) s += kv(i) * j.grad[i];
  return std::abs(s);
}

// ---------------------------------------------------------------------------
// w as a function of (u, z, zbar) and the flat metrics it generates.

/// Chart (u, x, y) with z = x + i y.
inline ChartPtr creq_chart() {
  static const ChartPtr c = Chart::make("uz", {"u", "x", "y"}, {{"z", "x", "y"}});
  return c;
}

/// |d_zbar w - w d_u w| at p; w lives on a chart with coordinate u and pair z.
inline double creq_residual(const Expression& w, std::span<const double> p) {
  const auto u = w.chart().index_of("u");
  const ComplexPair* z = w.chart().pair("z");
  if (!u || !z) throw PreconditionError("creq: w must be defined on a chart with u and pair z");
  const Jet2 j = w.jet(p);
  return std::abs(wirtinger(j, *z).dwbar - j.value * j.grad[*u]);
}

struct KerrW {
  Expression w, w_u, w_z, w_zbar;  // on a chart with u and pair z
};

struct FlatKerr {
  ChartPtr chart;  // (u, v, x, y), z = x + i y
  MetricField g;
  FormField kappa, mu;
  VectorField k;  // d/dv
  double max_creq = 0.0;
  double max_derivative_mismatch = 0.0;
};

/// g = kappa dv + mu mubar with kappa = du + wbar dz + w dzbar, mu = dw - v dz.
/// The partials of w are supplied so that the metric has exact second jets;
/// they are checked against the jets of w at the samples.
inline FlatKerr flat_kerr_metric(const KerrW& W, const std::vector<Point>& samples, double tol = 1e-10) {
  const Chart& base = W.w.chart();
  const auto ui = base.index_of("u");
  const ComplexPair* zp = base.pair("z");
  if (!ui || !zp || base.dim() != 3) throw PreconditionError("flat_kerr_metric: w must live on the (u, x, y) chart");
  FlatKerr out;
  for (const auto& p : samples) {
    out.max_creq = std::max(out.max_creq, creq_residual(W.w, p));
    const Jet2 j = W.w.jet(p);
    const auto wt = wirtinger(j, *zp);
    const double scale = 1.0 + std::abs(j.grad[*ui]) + std::abs(wt.dw) + std::abs(wt.dwbar);
    const double mm = std::max({std::abs(W.w_u.value(p) - j.grad[*ui]), std::abs(W.w_z.value(p) - wt.dw),
                                std::abs(W.w_zbar.value(p) - wt.dwbar)});
    out.max_derivative_mismatch = std::max(out.max_derivative_mismatch, mm / scale);
  }
  if (out.max_derivative_mismatch > 1e-6)
    throw PreconditionError("flat_kerr_metric: supplied partials of w disagree with w");
  if (out.max_creq > tol) throw PreconditionError("flat_kerr_metric: w violates the tangential Cauchy-Riemann equation");
  const ChartPtr c = lifted_chart(base, "v", 1);
  out.chart = c;
  auto ext = [&](const Expression& e) { return ScalarField(e.rebind(c)); };
  const ScalarField w = ext(W.w), wu = ext(W.w_u), wz = ext(W.w_z), wzb = ext(W.w_zbar);
  const FormField du = coordinate_differential(c, 0), dv = coordinate_differential(c, 1);
  const FormField dz = complex_differential(c, "z"), dzb = complex_differential(c, "z", true);
  out.kappa = du + conj(w) * dz + w * dzb;
  const ScalarField v = ScalarField(Expression::coordinate(c, "v"));
  out.mu = wu * du + (wz + ScalarField::constant(c, -1.0) * v) * dz + wzb * dzb;
  out.g = metric_from_terms(c, {{ScalarField::constant(c, 1.0), out.kappa, dv},
                                {ScalarField::constant(c, 1.0), out.mu, conj(out.mu)}});
  std::vector<ScalarField> kc(4, ScalarField::constant(c, 0.0));
  kc[1] = ScalarField::constant(c, 1.0);
  out.k = VectorField(c, kc);
  return out;
}

// ---------------------------------------------------------------------------
// The twistor bundle P over Minkowski space and its leaf space.

struct TwistorBundle {
  ChartPtr chart;  // (u, v, x, y, zr, zi); w = x + i y, z = zr + i zi
  MetricField g;
  NStructureSpec n;  // kappa_z, {mu_z, dz}
  VectorField k;
};

/// g_P = du dv + dw dwbar + (1 + z zbar / 4)^-2 dz dzbar.
inline TwistorBundle twistor_bundle_minkowski() {
  const ChartPtr c = Chart::make("twistor_bundle", {"u", "v", "x", "y", "zr", "zi"},
                                 {{"w", "x", "y"}, {"z", "zr", "zi"}});
  TwistorBundle t;
  t.chart = c;
  auto S = [&](const char* s) { return ScalarField(parse(s, c)); };
  t.g = metric_from_terms(c, {{S("1"), coordinate_differential(c, 0), coordinate_differential(c, 1)},
                              {S("1"), complex_differential(c, "w"), complex_differential(c, "w", true)},
                              {S("(1 + z*conj(z)/4)^(-2)"), complex_differential(c, "z"),
                               complex_differential(c, "z", true)}});
  const KerrForms f = kerr_forms(c, S("z"));
  t.n = {f.kappa, {f.mu, complex_differential(c, "z")}};
  t.k = f.k;
  return t;
}

/// Leaf space of k_z in P, coordinates (U, X, Y, zr, zi) with W = X + i Y the
/// value of w_z and U that of u_z. There kappa_z = dU + Wbar dz + W dzbar and
/// mu_z = dW mod dz.
inline CRChart twistor_cr_space() {
  const ChartPtr c = Chart::make("twistor_leaves", {"U", "X", "Y", "zr", "zi"}, {{"W", "X", "Y"}, {"z", "zr", "zi"}});
  const FormField dz = complex_differential(c, "z"), dzb = complex_differential(c, "z", true);
  const FormField kappa = coordinate_differential(c, 0) + ScalarField(parse("conj(W)", c)) * dz +
                          ScalarField(parse("W", c)) * dzb;
  return make_cr_chart(kappa, {complex_differential(c, "W"), dz}, "twistor_leaves");
}

/// The CR functions u - z wbar, w + z v, z on the leaf space.
inline std::array<Expression, 3> twistor_cr_functions(const CRChart& leaves) {
  const ChartPtr& c = leaves.chart;
  return {parse("U + conj(z)*W", c), parse("W", c), parse("z", c)};
}

// ---------------------------------------------------------------------------
// Quadric, projective twistors, null lines.

inline cplx quadric_residual(cplx z1, cplx z2, cplx z3) {
  return z3 - std::conj(z3) + z1 * std::conj(z2) - std::conj(z1) * z2;
}

/// Point of the quadric with given z1, z2 and Re z3.
inline C3 quadric_point(cplx z1, cplx z2, double re3) {
  return {z1, z2, cplx(re3, -std::imag(z1 * std::conj(z2)))};
}

struct TwistorPoint {
  std::array<cplx, 4> w{};

  bool same_direction(const TwistorPoint& o, double tol = 1e-10) const {
    Eigen::Matrix<cplx, 4, 2> m;
    for (int i = 0; i < 4; ++i) {
      m(i, 0) = w[i];
      m(i, 1) = o.w[i];
    }
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 4, 2>> svd(m);
    const auto s = svd.singularValues();
    return s(0) > 0 && s(1) <= tol * s(0);
  }
};

inline TwistorPoint to_projective_twistor(cplx z1, cplx z2, cplx z3) {
  const cplx i(0, 1);
  return {{1.0 + i * z3, z1 - i * z2, 1.0 - i * z3, z1 + i * z2}};
}

inline double null_norm(const TwistorPoint& t) {
  return std::norm(t.w[0]) + std::norm(t.w[1]) - std::norm(t.w[2]) - std::norm(t.w[3]);
}

/// l(t) = (1/2 (z3 + z3bar + z1 z2bar + z1bar z2) - |z1|^2 t, t, z2 - z1 t).
/// Here z1 is the direction (dl/dt = k_{z1}), z2 = w + z1 v and z3 = u - z1 wbar.
struct NullLine {
  double u0;
  cplx w0;
  cplx z;

  std::array<double, 4> at(double t) const {
    const cplx w = w0 - z * t;
    return {u0 - std::norm(z) * t, t, w.real(), w.imag()};
  }
  std::array<double, 4> tangent() const { return {-std::norm(z), 1.0, -z.real(), -z.imag()}; }
};

inline NullLine line_from_twistor(cplx z1, cplx z2, cplx z3, double tol = 1e-10) {
  if (std::abs(quadric_residual(z1, z2, z3)) > tol * (1.0 + std::abs(z1) * std::abs(z2) + std::abs(z3)))
    throw PreconditionError("line_from_twistor: point is off the quadric");
  const double u0 = 0.5 * (z3 + std::conj(z3) + z1 * std::conj(z2) + std::conj(z1) * z2).real();
  return {u0, z2, z1};
}

/// Twistor of the null line through (u, v, w) with direction k_z.
inline C3 twistor_from_line(double u, double v, cplx w, cplx z) { return {z, w + z * v, u - z * std::conj(w)}; }

/// Twistor of the line through p with real null direction d = (du, dv, dx, dy).
inline C3 twistor_from_direction(double u, double v, cplx w, const std::array<double, 4>& d, double tol = 1e-10) {
  const double scale = std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2]) + std::abs(d[3]);
  if (!(scale > 0)) throw PreconditionError("twistor_from_direction: zero direction");
  if (std::abs(d[0] * d[1] + d[2] * d[2] + d[3] * d[3]) > tol * scale * scale)
    throw PreconditionError("twistor_from_direction: direction is not null");
  if (std::abs(d[1]) <= tol * scale)
    throw PreconditionError("twistor_from_direction: lines parallel to d/du have no twistor in this chart");
  const cplx z = -cplx(d[2], d[3]) / d[1];
  return twistor_from_line(u, v, w, z);
}

// ---------------------------------------------------------------------------
// Shear-free iff the leaf map is a CR submanifold; the volume identity.

namespace kerr_detail {

inline FormAtPoint exact(const Jet2& f) {
  FormAtPoint r(f.dim, 1);
  for (int i = 0; i < f.dim; ++i) r[Mask{1} << i] = f.grad[i];
  return r;
}

}  // namespace kerr_detail

struct ShearCrSample {
  double crsub = 0.0;  // |a ^ b ^ c| / (|a| |b| |c|) for (f o pi)^* omega = a ^ b ^ c, 0 if a factor vanishes
  double shear = 0.0;  // optics shear residual of k_z
};

struct ShearCrReport {
  std::vector<ShearCrSample> samples;
  double tol = 1e-8;

  double max_crsub() const {
    double m = 0;
    for (const auto& s : samples) m = std::max(m, s.crsub);
    return m;
  }
  double max_shear() const {
    double m = 0;
    for (const auto& s : samples) m = std::max(m, s.shear);
    return m;
  }
  bool agree() const {
    for (const auto& s : samples)
      if ((s.crsub < tol) != (s.shear < tol)) return false;
    return true;
  }
};

/// Pulls omega = d(u - z wbar) ^ d(w_z) ^ dz back along (u, v, w) -> (u_z, w_z, z),
/// next to the shear residual of k_z in the Minkowski metric g.
inline ShearCrReport shearfree_iff_crsub(const KerrForms& f, const MetricField& g, const std::vector<Point>& samples,
                                         double tol = 1e-8) {
  const CRChart leaves = twistor_cr_space();
  const auto fn = twistor_cr_functions(leaves);
  const DescentFields dsc = descent_fields(f.chart, f.z);
  auto real_part = [](ScalarField s) {
    return ScalarField(s.chart_ptr(), [s](std::span<const double> p) { return re(s.jet(p)); });
  };
  auto imag_part = [](ScalarField s) {
    return ScalarField(s.chart_ptr(), [s](std::span<const double> p) { return im(s.jet(p)); });
  };
  const ChartMap leaf_map(f.chart, leaves.chart,
                          {dsc.u_z, real_part(dsc.w_z), imag_part(dsc.w_z), real_part(f.z), imag_part(f.z)});
  std::array<FormField, 3> dz;
  for (int a = 0; a < 3; ++a) {
    const Expression e = fn[a];
    dz[a] = FormField::from_jet_fn(leaves.chart, 1, [e](std::span<const double> p) {
      const Jet2 j = e.jet(p);
      std::vector<Jet2> c;
      for (int i = 0; i < j.dim; ++i) c.push_back(partial(j, i));
      return one_form_jet(c);
    });
  }
  ShearCrReport rep;
  rep.tol = tol;
  for (const auto& p : samples) {
    const CMat J = leaf_map.jacobian(p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J.real());
    const auto s = svd.singularValues();
    if (!(s(2) > 1e-8 * s(0))) throw PreconditionError("shearfree_iff_crsub: leaf map has rank below 3");
    std::array<FormAtPoint, 3> pb;
    for (int a = 0; a < 3; ++a) pb[a] = pullback(leaf_map, dz[a], p);
    const double num = wedge(wedge(pb[0], pb[1]), pb[2]).norm();
    // a factor below roundoff of the Jacobian is the zero form
    const double floor = 1e-12 * (1.0 + J.norm());
    ShearCrSample smp;
    if (pb[0].norm() > floor && pb[1].norm() > floor && pb[2].norm() > floor)
      smp.crsub = num / (pb[0].norm() * pb[1].norm() * pb[2].norm());
    smp.shear = shear_residual(f.k, g, p).residual;
    rep.samples.push_back(smp);
  }
  return rep;
}

struct VolumeIdentity {
  double lhs = 0.0;  // coefficient of du dv dx dy in i du dv dw dwbar
  double rhs = 0.0;  // same for i |Zbar _| dw_z - v|^2 du_z dv dz dzbar
  double jacobian = 0.0;  // of (u, v, w) -> (u_z, v, z); the identity needs it nonzero
  double residual() const { return std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs)); }
};

/// Both sides through the Jacobian of (u, v, w) -> (u_z, v, z); Zbar _| dw_z is
/// d w_z / dz - wbar_z d w_z / du_z with w_z regarded as a function of (u_z, v, z).
inline VolumeIdentity volume_identity(const KerrForms& f, std::span<const double> p) {
  const MinkIndex mi = MinkIndex::of(*f.chart);
  const DescentFields dsc = descent_fields(f.chart, f.z);
  const Jet2 uz = dsc.u_z.jet(p), wz = dsc.w_z.jet(p), z = f.z.jet(p);
  Eigen::Matrix4d J;
  for (int i = 0; i < 4; ++i) {
    J(0, i) = uz.grad[i].real();
    J(1, i) = i == mi.v ? 1.0 : 0.0;
    J(2, i) = z.grad[i].real();
    J(3, i) = z.grad[i].imag();
  }
  Eigen::Vector4cd gw;
  for (int i = 0; i < 4; ++i) gw(i) = wz.grad[i];
  // gradient in the new coordinates (u_z, v, zr, zi)
  const Eigen::Vector4cd gn = J.transpose().cast<cplx>().fullPivLu().solve(gw);
  const cplx dwdz = 0.5 * (gn(2) - cplx(0, 1) * gn(3));
  const cplx zbar_w = dwdz - std::conj(wz.value) * gn(0);
  VolumeIdentity r;
  // i dw ^ dwbar = 2 dx ^ dy; likewise for z
  r.lhs = 2.0;
  r.jacobian = J.determinant();
  r.rhs = 2.0 * std::norm(zbar_w - p[mi.v]) * r.jacobian;
  return r;
}

/// kappa_z lambda_z + mu_z mubar_z for constant z; equals du dv + dw dwbar.
inline MetricField lorentz_family_metric(const ChartPtr& chart, cplx z) {
  const KerrForms f = kerr_forms(chart, ScalarField::constant(chart, z));
  return metric_from_terms(chart, {{ScalarField::constant(chart, 1.0), f.kappa, f.lambda},
                                   {ScalarField::constant(chart, 1.0), f.mu, conj(f.mu)}});
}

}  // namespace robinson
