#pragma once

// Christoffel symbols, Riemann, Ricci, scalar and Weyl curvature at a point.
//
// Convention:
//   R^r_{smn} = d_m G^r_{ns} - d_n G^r_{ms} + G^r_{ml} G^l_{ns} - G^r_{nl} G^l_{ms}
//   R_{sn}    = R^r_{srn}

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "robinson/fields.hpp"

namespace robinson {

/// Dense tensor with all indices of range dim, row-major.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
    std::size_t n = 1;
    for (int k = 0; k < rank; ++k) n *= dim;
    data_.assign(n, cplx{});
  }
  int dim() const { return dim_; }
  int rank() const { return rank_; }

  cplx& operator()(int a) { return data_[a]; }
  cplx& operator()(int a, int b) { return data_[a * dim_ + b]; }
  cplx& operator()(int a, int b, int c) { return data_[(a * dim_ + b) * dim_ + c]; }
  cplx& operator()(int a, int b, int c, int d) {
    return data_[((a * dim_ + b) * dim_ + c) * dim_ + d];
  }
  cplx operator()(int a) const { return data_[a]; }
  cplx operator()(int a, int b) const { return data_[a * dim_ + b]; }
  cplx operator()(int a, int b, int c) const { return data_[(a * dim_ + b) * dim_ + c]; }
  cplx operator()(int a, int b, int c, int d) const {
    return data_[((a * dim_ + b) * dim_ + c) * dim_ + d];
  }

  double max_abs() const {
    double m = 0.0;
    for (cplx c : data_) m = std::max(m, std::abs(c));
    return m;
  }
  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

 private:
  int dim_ = 0;
  int rank_ = 0;
  std::vector<cplx> data_;
};

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

struct CurvatureAtPoint {
  MetricAtPoint metric;
  Tensor christoffel;   // G^r_{mn}
  Tensor dchristoffel;  // d_a G^r_{mn} stored as (a, r, m, n)
  Tensor riemann;       // R^r_{smn}
  Tensor riemann_low;   // R_{rsmn}
  Tensor ricci;         // R_{mn}
  cplx scalar;
  Tensor weyl;  // C_{rsmn}
  double scale = 1.0;  // 1 + max|dG| + max|G|^2

  int dim() const { return metric.dim(); }
};

inline CurvatureAtPoint curvature_at(const MetricField& g, std::span<const double> p) {
  const int n = g.dim();
  if (n < 3) throw PreconditionError("curvature: dimension must be at least 3");
  CurvatureAtPoint c;
  c.metric = g.at(p);
  const auto gj = g.jets(p);
  for (const auto& j : gj)
    if (j.order < 2) throw PreconditionError("curvature: metric components need second derivatives");
  const CMat& gi = c.metric.g_inv;

  auto dg = [&](int a, int m, int q) { return gj[m * n + q].grad[a]; };
  auto ddg = [&](int a, int b, int m, int q) { return gj[m * n + q].dd(a, b); };

  // d_a g^{rs} = -g^{rm} d_a g_{mq} g^{qs}
  Tensor dgi(n, 3);
  for (int a = 0; a < n; ++a)
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        cplx v = 0.0;
        for (int m = 0; m < n; ++m)
          for (int q = 0; q < n; ++q) v -= gi(r, m) * dg(a, m, q) * gi(q, s);
        dgi(a, r, s) = v;
      }

  // first-kind symbols and their derivatives
  Tensor G1(n, 3), dG1(n, 4);
  for (int s = 0; s < n; ++s)
    for (int m = 0; m < n; ++m)
      for (int q = 0; q < n; ++q) {
        G1(s, m, q) = 0.5 * (dg(m, s, q) + dg(q, s, m) - dg(s, m, q));
        for (int a = 0; a < n; ++a)
          dG1(a, s, m, q) = 0.5 * (ddg(a, m, s, q) + ddg(a, q, s, m) - ddg(a, s, m, q));
      }

  c.christoffel = Tensor(n, 3);
  c.dchristoffel = Tensor(n, 4);
  double maxG = 0.0, maxdG = 0.0;
  for (int r = 0; r < n; ++r)
    for (int m = 0; m < n; ++m)
      for (int q = 0; q < n; ++q) {
        cplx v = 0.0;
        for (int s = 0; s < n; ++s) v += gi(r, s) * G1(s, m, q);
        c.christoffel(r, m, q) = v;
        maxG = std::max(maxG, std::abs(v));
        for (int a = 0; a < n; ++a) {
          cplx w = 0.0;
          for (int s = 0; s < n; ++s) w += dgi(a, r, s) * G1(s, m, q) + gi(r, s) * dG1(a, s, m, q);
          c.dchristoffel(a, r, m, q) = w;
          maxdG = std::max(maxdG, std::abs(w));
        }
      }
  c.scale = 1.0 + maxdG + maxG * maxG;

  const Tensor& G = c.christoffel;
  const Tensor& dG = c.dchristoffel;
  c.riemann = Tensor(n, 4);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
          cplx v = dG(m, r, q, s) - dG(q, r, m, s);
          for (int l = 0; l < n; ++l) v += G(r, m, l) * G(l, q, s) - G(r, q, l) * G(l, m, s);
          c.riemann(r, s, m, q) = v;
        }

  c.riemann_low = Tensor(n, 4);
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
          cplx v = 0.0;
          for (int r = 0; r < n; ++r) v += c.metric.g(a, r) * c.riemann(r, s, m, q);
          c.riemann_low(a, s, m, q) = v;
        }

  c.ricci = Tensor(n, 2);
  for (int s = 0; s < n; ++s)
    for (int q = 0; q < n; ++q) {
      cplx v = 0.0;
      for (int r = 0; r < n; ++r) v += c.riemann(r, s, r, q);
      c.ricci(s, q) = v;
    }
  c.scalar = 0.0;
  for (int s = 0; s < n; ++s)
    for (int q = 0; q < n; ++q) c.scalar += gi(s, q) * c.ricci(s, q);

  const CMat& gm = c.metric.g;
  const double nn = n;
  c.weyl = Tensor(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d) {
          cplx v = c.riemann_low(a, b, cc, d);
          v -= (gm(a, cc) * c.ricci(b, d) - gm(a, d) * c.ricci(b, cc) - gm(b, cc) * c.ricci(a, d) +
                gm(b, d) * c.ricci(a, cc)) /
               (nn - 2.0);
          v += c.scalar * (gm(a, cc) * gm(b, d) - gm(a, d) * gm(b, cc)) / ((nn - 1.0) * (nn - 2.0));
          c.weyl(a, b, cc, d) = v;
        }
  return c;
}

struct CurvatureSymmetry {
  double pair_antisym = 0.0;
  double pair_exchange = 0.0;
  double bianchi = 0.0;
  double weyl_trace = 0.0;
};

/// Algebraic identities of R_{rsmn} and tracelessness of C, normalized by
/// 1 + the largest component.
inline CurvatureSymmetry curvature_symmetries(const CurvatureAtPoint& c) {
  const int n = c.dim();
  const Tensor& R = c.riemann_low;
  const double s = 1.0 + R.max_abs();
  const double sw = 1.0 + c.weyl.max_abs();
  CurvatureSymmetry out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q) {
          out.pair_antisym = std::max({out.pair_antisym, std::abs(R(a, b, m, q) + R(b, a, m, q)),
                                       std::abs(R(a, b, m, q) + R(a, b, q, m))});
          out.pair_exchange = std::max(out.pair_exchange, std::abs(R(a, b, m, q) - R(m, q, a, b)));
          out.bianchi = std::max(out.bianchi,
                                 std::abs(R(a, b, m, q) + R(a, m, q, b) + R(a, q, b, m)));
        }
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      cplx t1 = 0.0, t2 = 0.0;
      for (int a = 0; a < n; ++a)
        for (int cc = 0; cc < n; ++cc) {
          t1 += c.metric.g_inv(a, cc) * c.weyl(a, b, cc, d);
          t2 += c.metric.g_inv(a, cc) * c.weyl(b, a, d, cc);
        }
      out.weyl_trace = std::max({out.weyl_trace, std::abs(t1), std::abs(t2)});
    }
  out.pair_antisym /= s;
  out.pair_exchange /= s;
  out.bianchi /= s;
  out.weyl_trace /= sw;
  return out;
}

/// max|Riemann| / scale at p.
inline double flatness_residual(const CurvatureAtPoint& c) { return c.riemann.max_abs() / c.scale; }
inline double ricci_residual(const CurvatureAtPoint& c) { return c.ricci.max_abs() / c.scale; }

struct SampleReport {
  double max_residual = 0.0;
  double min_residual = 0.0;
  int samples = 0;
  bool holds(double tol) const { return max_residual < tol; }
};

inline SampleReport is_flat(const MetricField& g, const std::vector<Point>& pts) {
  SampleReport r;
  r.min_residual = INFINITY;
  for (const auto& p : pts) {
    const double v = flatness_residual(curvature_at(g, p));
    r.max_residual = std::max(r.max_residual, v);
    r.min_residual = std::min(r.min_residual, v);
    ++r.samples;
  }
  return r;
}

inline SampleReport is_ricci_flat(const MetricField& g, const std::vector<Point>& pts) {
  SampleReport r;
  r.min_residual = INFINITY;
  for (const auto& p : pts) {
    const double v = ricci_residual(curvature_at(g, p));
    r.max_residual = std::max(r.max_residual, v);
    r.min_residual = std::min(r.min_residual, v);
    ++r.samples;
  }
  return r;
}

/// Hodge star on the first index pair of a 4-index tensor.
inline Tensor star_first_pair(const Tensor& t, const MetricAtPoint& g, int orientation) {
  Tensor r(4, 4);
  for (int cc = 0; cc < 4; ++cc)
    for (int d = 0; d < 4; ++d) {
      FormAtPoint f(4, 2);
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) f[indices_mask({a, b})] = t(a, b, cc, d);
      const FormAtPoint s = hodge(f, g, orientation);
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          r(a, b, cc, d) = s[indices_mask({a, b})];
          r(b, a, cc, d) = -s[indices_mask({a, b})];
        }
    }
  return r;
}

struct SdAsd {
  Tensor plus, minus;
};

/// C = C+ + C-, with *C+ = iC+ and *C- = -iC- on the first pair.
inline SdAsd sd_asd_split(const CurvatureAtPoint& c, int orientation = 1) {
  if (c.dim() != 4 || !c.metric.lorentzian())
    throw PreconditionError("sd_asd_split: needs a Lorentzian metric in dimension 4");
  const Tensor sc = star_first_pair(c.weyl, c.metric, orientation);
  SdAsd out{Tensor(4, 4), Tensor(4, 4)};
  const cplx i(0.0, 1.0);
  for (std::size_t k = 0; k < sc.data().size(); ++k) {
    out.plus.data()[k] = 0.5 * (c.weyl.data()[k] - i * sc.data()[k]);
    out.minus.data()[k] = 0.5 * (c.weyl.data()[k] + i * sc.data()[k]);
  }
  return out;
}

}  // namespace robinson
