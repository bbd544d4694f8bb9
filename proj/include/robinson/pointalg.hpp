#pragma once

// Multilinear algebra at a single point: exterior forms stored by
// increasing multi-index, metrics, the Hodge star in dimension four, null
// tetrads and totally null subspace tests.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "robinson/errors.hpp"
#include "robinson/jet.hpp"

namespace robinson {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// A multi-index i1 < i2 < ... is encoded as a bit mask.
using Mask = std::uint32_t;

inline int mask_degree(Mask m) { return std::popcount(m); }

inline std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (int i = 0; m; ++i, m >>= 1)
    if (m & 1u) out.push_back(i);
  return out;
}

inline Mask indices_mask(std::initializer_list<int> idx) {
  Mask m = 0;
  for (int i : idx) m |= Mask{1} << i;
  return m;
}

/// Sign of e_A ^ e_B when both are increasing multi-indices; 0 if they overlap.
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (int j : mask_indices(b)) swaps += std::popcount(a >> (j + 1));
  return (swaps & 1) ? -1 : 1;
}

class FormAtPoint {
 public:
  FormAtPoint() = default;
  FormAtPoint(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1 || dim > kMaxDim) throw PreconditionError("form dimension out of range");
    if (degree < 0 || degree > dim) throw PreconditionError("form degree out of range");
    comp_.assign(std::size_t{1} << dim, cplx{});
  }

  static FormAtPoint one_form(const CVec& c) {
    FormAtPoint f(static_cast<int>(c.size()), 1);
    for (int i = 0; i < c.size(); ++i) f[Mask{1} << i] = c(i);
    return f;
  }

  static FormAtPoint scalar(int dim, cplx c) {
    FormAtPoint f(dim, 0);
    f[0] = c;
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }

  cplx operator[](Mask m) const { return comp_[m]; }
  cplx& operator[](Mask m) { return comp_[m]; }

  /// Component with an arbitrary (possibly unordered) index list.
  cplx at(std::initializer_list<int> idx) const {
    Mask m = 0;
    int sign = 1;
    for (int i : idx) {
      if (m & (Mask{1} << i)) return 0.0;
      sign *= wedge_sign(m, Mask{1} << i);
      m |= Mask{1} << i;
    }
    return double(sign) * comp_[m];
  }

  template <typename F>
  void for_each(F&& f) const {
    for (Mask m = 0; m < comp_.size(); ++m)
      if (mask_degree(m) == degree_) f(m, comp_[m]);
  }

  double norm() const {
    double s = 0.0;
    for_each([&](Mask, cplx c) { s += std::norm(c); });
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0.0;
    for_each([&](Mask, cplx c) { s = std::max(s, std::abs(c)); });
    return s;
  }

  FormAtPoint conj() const {
    FormAtPoint r = *this;
    for (auto& c : r.comp_) c = std::conj(c);
    return r;
  }

  FormAtPoint& operator+=(const FormAtPoint& o) {
    check_same(o);
    for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] += o.comp_[i];
    return *this;
  }
  FormAtPoint& operator-=(const FormAtPoint& o) {
    check_same(o);
    for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] -= o.comp_[i];
    return *this;
  }
  FormAtPoint& operator*=(cplx s) {
    for (auto& c : comp_) c *= s;
    return *this;
  }

  /// Full antisymmetric array, row-major over `degree` indices of size dim.
  std::vector<cplx> to_full() const;
  static FormAtPoint from_full(int dim, int degree, const std::vector<cplx>& full);

 private:
  void check_same(const FormAtPoint& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_)
      throw PreconditionError("form shape mismatch");
  }

  int dim_ = 0;
  int degree_ = 0;
  std::vector<cplx> comp_;
};

inline FormAtPoint operator+(FormAtPoint a, const FormAtPoint& b) { return a += b; }
inline FormAtPoint operator-(FormAtPoint a, const FormAtPoint& b) { return a -= b; }
inline FormAtPoint operator*(cplx s, FormAtPoint a) { return a *= s; }

namespace pointalg_detail {

inline int perm_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
      else if (p[i] == p[j]) return 0;
  return sign;
}

}  // namespace pointalg_detail

inline std::vector<cplx> FormAtPoint::to_full() const {
  std::size_t total = 1;
  for (int k = 0; k < degree_; ++k) total *= dim_;
  std::vector<cplx> full(total);
  std::vector<int> idx(degree_);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    Mask m = 0;
    for (int k = degree_ - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(r % dim_);
      r /= dim_;
      m |= Mask{1} << idx[k];
    }
    const int s = pointalg_detail::perm_sign(idx);
    full[flat] = s == 0 ? cplx{} : double(s) * comp_[m];
  }
  return full;
}

inline FormAtPoint FormAtPoint::from_full(int dim, int degree, const std::vector<cplx>& full) {
  FormAtPoint f(dim, degree);
  for (Mask m = 0; m < (Mask{1} << dim); ++m) {
    if (mask_degree(m) != degree) continue;
    std::size_t flat = 0;
    for (int i : mask_indices(m)) flat = flat * dim + i;
    f[m] = full[flat];
  }
  return f;
}

inline FormAtPoint wedge(const FormAtPoint& a, const FormAtPoint& b) {
  if (a.dim() != b.dim()) throw PreconditionError("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim())
    throw PreconditionError("wedge: degree " + std::to_string(a.degree() + b.degree()) +
                            " exceeds dimension " + std::to_string(a.dim()));
  FormAtPoint r(a.dim(), a.degree() + b.degree());
  a.for_each([&](Mask ma, cplx ca) {
    if (ca == cplx{}) return;
    b.for_each([&](Mask mb, cplx cb) {
      const int s = wedge_sign(ma, mb);
      if (s != 0) r[ma | mb] += double(s) * ca * cb;
    });
  });
  return r;
}

/// v contracted into the first slot of a.
inline FormAtPoint interior(const CVec& v, const FormAtPoint& a) {
  if (a.degree() < 1) throw PreconditionError("interior: degree must be at least 1");
  if (v.size() != a.dim()) throw PreconditionError("interior: dimension mismatch");
  FormAtPoint r(a.dim(), a.degree() - 1);
  a.for_each([&](Mask m, cplx c) {
    int pos = 0;
    for (int i : mask_indices(m)) {
      const double s = (pos & 1) ? -1.0 : 1.0;
      r[m & ~(Mask{1} << i)] += s * v(i) * c;
      ++pos;
    }
  });
  return r;
}

/// Value of a 1-form on a vector.
inline cplx pair(const FormAtPoint& a, const CVec& v) {
  return interior(v, a)[0];
}

struct MetricAtPoint {
  CMat g;
  CMat g_inv;
  cplx det;

  MetricAtPoint() = default;
  explicit MetricAtPoint(CMat m) : g(std::move(m)) {
    if (g.rows() != g.cols()) throw PreconditionError("metric must be square");
    // exact symmetry
    for (int i = 0; i < g.rows(); ++i)
      for (int j = i + 1; j < g.cols(); ++j) {
        const cplx s = 0.5 * (g(i, j) + g(j, i));
        g(i, j) = g(j, i) = s;
      }
    Eigen::FullPivLU<CMat> lu(g);
    det = lu.determinant();
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (std::abs(det) <= 1e-300 || lu.rank() < g.rows() ||
        std::abs(det) < 1e-14 * std::pow(scale, double(g.rows())))
      throw PreconditionError("metric is singular");
    g_inv = lu.inverse();
  }

  int dim() const { return static_cast<int>(g.rows()); }

  cplx operator()(const CVec& a, const CVec& b) const { return (a.transpose() * g * b)(0, 0); }

  CVec lower(const CVec& v) const { return g * v; }
  CVec raise(const CVec& a) const { return g_inv * a; }

  bool is_real(double tol = 1e-12) const { return g.imag().cwiseAbs().maxCoeff() <= tol; }

  /// (positive, negative) eigenvalue counts of the real part.
  std::pair<int, int> signature() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.real());
    int pos = 0, neg = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      (es.eigenvalues()(i) > 0 ? pos : neg)++;
    return {pos, neg};
  }

  bool lorentzian() const {
    auto [p, n] = signature();
    return is_real() && n == 1 && p == dim() - 1;
  }
};

namespace pointalg_detail {

inline cplx minor_det(const CMat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  CMat s(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) s(a, b) = m(rows[a], cols[b]);
  return s.determinant();
}

}  // namespace pointalg_detail

/// Raises every index of a form with g^{-1}; for increasing multi-indices the
/// raised component is a minor determinant of g^{-1}.
inline FormAtPoint raise_all(const FormAtPoint& a, const MetricAtPoint& g) {
  FormAtPoint r(a.dim(), a.degree());
  r.for_each([&](Mask mi, cplx) {
    cplx s = 0.0;
    const auto ri = mask_indices(mi);
    a.for_each([&](Mask mk, cplx c) {
      if (c != cplx{}) s += pointalg_detail::minor_det(g.g_inv, ri, mask_indices(mk)) * c;
    });
    r[mi] = s;
  });
  return r;
}

/// Hodge star in dimension four. The symbol is fixed so that, in orthonormal
/// Minkowski coordinates (t,x,y,z) with orientation +1, *(dt^dx) = dy^dz.
inline FormAtPoint hodge(const FormAtPoint& a, const MetricAtPoint& g, int orientation = 1) {
  if (a.dim() != 4 || g.dim() != 4)
    throw PreconditionError("hodge: only dimension 4 is supported");
  if (orientation != 1 && orientation != -1)
    throw PreconditionError("hodge: orientation must be +1 or -1");
  const FormAtPoint up = raise_all(a, g);
  const cplx vol = std::sqrt(std::abs(g.det));
  FormAtPoint r(4, 4 - a.degree());
  const Mask full = 0xF;
  up.for_each([&](Mask mi, cplx c) {
    if (c == cplx{}) return;
    const Mask mj = full & ~mi;
    std::vector<int> perm = mask_indices(mi);
    for (int j : mask_indices(mj)) perm.push_back(j);
    r[mj] += -double(orientation) * vol * c * double(pointalg_detail::perm_sign(perm));
  });
  return r;
}

/// g(a, b) for forms of equal degree, using the increasing-index sum.
inline cplx form_inner(const FormAtPoint& a, const FormAtPoint& b, const MetricAtPoint& g) {
  const FormAtPoint up = raise_all(b, g);
  cplx s = 0.0;
  a.for_each([&](Mask m, cplx c) { s += c * up[m]; });
  return s;
}

struct NullTetrad {
  CVec l, n, m;
};

struct TetradResiduals {
  double null_orth = 0.0;     // max of the vanishing inner products
  double normalization = 0.0;  // |g(l,n) - 1| and |g(m,mbar) - 1|
  double reconstruction = 0.0;  // max |g - (l n + n l + m mbar + mbar m)|
};

namespace pointalg_detail {

/// Gram-Schmidt in a nondegenerate real metric, keeping order.
inline std::vector<Eigen::VectorXd> orthonormalize(std::vector<Eigen::VectorXd> v,
                                                   const Eigen::MatrixXd& g,
                                                   std::vector<double>& norms) {
  norms.clear();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      v[i] -= (v[i].dot(g * v[j]) / norms[j]) * v[j];
    const double q = v[i].dot(g * v[i]);
    if (std::abs(q) < 1e-12) throw PreconditionError("tetrad: degenerate Gram-Schmidt step");
    v[i] /= std::sqrt(std::abs(q));
    norms.push_back(q > 0 ? 1.0 : -1.0);
  }
  return v;
}

}  // namespace pointalg_detail

/// Orthonormal frame (T, X, Y, Z), T timelike, positively oriented in chart
/// order. A nonzero seed applies a random Lorentz transformation first.
inline std::array<Eigen::VectorXd, 4> orthonormal_frame(const MetricAtPoint& gm,
                                                        std::uint64_t seed = 0) {
  if (gm.dim() != 4 || !gm.lorentzian())
    throw PreconditionError("tetrad: metric is not Lorentzian of dimension 4");
  const Eigen::MatrixXd g = gm.g.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  std::vector<Eigen::VectorXd> base;
  int t_idx = 0;
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()(i) < 0) t_idx = i;
  base.push_back(es.eigenvectors().col(t_idx) / std::sqrt(-es.eigenvalues()(t_idx)));
  for (int i = 0; i < 4; ++i)
    if (i != t_idx) base.push_back(es.eigenvectors().col(i) / std::sqrt(es.eigenvalues()(i)));

  std::vector<Eigen::VectorXd> v = base;
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    // T' = cosh-like combination; spatial parts random
    Eigen::Vector3d beta(uni(rng), uni(rng), uni(rng));
    beta *= 0.8 / std::max(1.0, beta.norm());
    v[0] = base[0] + beta(0) * base[1] + beta(1) * base[2] + beta(2) * base[3];
    for (int i = 1; i < 4; ++i) {
      v[i] = 0.3 * uni(rng) * base[0];
      for (int j = 1; j < 4; ++j) v[i] += (i == j ? 1.0 : 0.0) * base[j] + 0.7 * uni(rng) * base[j];
    }
  }
  std::vector<double> norms;
  v = pointalg_detail::orthonormalize(v, g, norms);
  if (norms[0] > 0) throw PreconditionError("tetrad: first frame vector not timelike");
  Eigen::Matrix4d frame;
  for (int i = 0; i < 4; ++i) frame.col(i) = v[i];
  if (frame.determinant() < 0) v[3] = -v[3];
  return {v[0], v[1], v[2], v[3]};
}

/// l = (T+X)/sqrt2, n = (X-T)/sqrt2, m = (Y+iZ)/sqrt2; g(l,n) = g(m,mbar) = 1.
inline NullTetrad build_null_tetrad(const MetricAtPoint& g, std::uint64_t seed = 0) {
  auto f = orthonormal_frame(g, seed);
  const double r = 1.0 / std::sqrt(2.0);
  NullTetrad t;
  t.l = ((f[0] + f[1]) * r).cast<cplx>();
  t.n = ((f[1] - f[0]) * r).cast<cplx>();
  t.m = (f[2].cast<cplx>() + cplx(0, 1) * f[3].cast<cplx>()) * r;
  return t;
}

inline TetradResiduals tetrad_residuals(const NullTetrad& t, const MetricAtPoint& g) {
  TetradResiduals r;
  const CVec mb = t.m.conjugate();
  for (cplx c : {g(t.l, t.l), g(t.n, t.n), g(t.m, t.m), g(t.l, t.m), g(t.n, t.m)})
    r.null_orth = std::max(r.null_orth, std::abs(c));
  r.normalization = std::max(std::abs(g(t.l, t.n) - 1.0), std::abs(g(t.m, mb) - 1.0));
  const CVec L = g.lower(t.l), N = g.lower(t.n), M = g.lower(t.m), Mb = g.lower(mb);
  // the inverse metric is l n + n l + m mbar + mbar m
  const CMat ginv = t.l * t.n.transpose() + t.n * t.l.transpose() + t.m * mb.transpose() +
                    mb * t.m.transpose();
  const CMat rec = L * N.transpose() + N * L.transpose() + M * Mb.transpose() + Mb * M.transpose();
  r.reconstruction = std::max((rec - g.g).cwiseAbs().maxCoeff(),
                              (ginv - g.g_inv).cwiseAbs().maxCoeff());
  return r;
}

struct MtnVerdict {
  bool totally_null = false;
  bool maximal = false;
  double max_inner = 0.0;
  int rank = 0;
  bool ok() const { return totally_null && maximal; }
};

/// True iff the vectors span a totally null subspace of dimension dim/2.
inline MtnVerdict mtn_check(const std::vector<CVec>& vectors, const MetricAtPoint& g,
                            double tol = 1e-10) {
  if (vectors.empty()) throw PreconditionError("mtn_check: empty list");
  MtnVerdict v;
  double scale = 0.0;
  for (const auto& a : vectors) scale = std::max(scale, a.norm());
  scale = std::max(1.0, scale * scale * g.g.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i; j < vectors.size(); ++j)
      v.max_inner = std::max(v.max_inner, std::abs(g(vectors[i], vectors[j])) / scale);
  CMat m(g.dim(), static_cast<int>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) m.col(static_cast<int>(i)) = vectors[i];
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-9 * std::max(1.0, s(0))) ++v.rank;
  v.totally_null = v.max_inner <= tol;
  v.maximal = 2 * v.rank == g.dim();
  return v;
}

/// Orthonormal basis of the null space of a (columns = unknowns).
inline CMat nullspace(const CMat& a, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * std::max(1.0, top)) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace robinson
