#pragma once

// Fields over a chart and the calculus on them. A scalar field is anything
// that produces a Jet2 at a point; parsed expressions are the common case,
// numerically solved fields (Kerr) and pullbacks are the others.

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robinson/exprjet.hpp"
#include "robinson/pointalg.hpp"

namespace robinson {

using Point = std::vector<double>;

class ScalarField {
 public:
  using Fn = std::function<Jet2(std::span<const double>)>;

  ScalarField() = default;
  ScalarField(ChartPtr chart, Fn fn, std::string label = "<field>")
      : chart_(std::move(chart)), fn_(std::move(fn)), label_(std::move(label)) {}
  ScalarField(const Expression& e)  // NOLINT: implicit on purpose
      : chart_(e.chart_ptr()), expr_(std::make_shared<Expression>(e)), label_(e.to_string()) {}

  static ScalarField constant(ChartPtr chart, cplx c) {
    return ScalarField(Expression::constant(std::move(chart), c));
  }

  Jet2 jet(std::span<const double> p) const {
    if (expr_) return expr_->jet(p);
    if (!fn_) {
      Jet2 z;
      z.dim = static_cast<int>(p.size());
      return z;
    }
    return fn_(p);
  }
  cplx value(std::span<const double> p) const { return jet(p).value; }

  const ChartPtr& chart_ptr() const { return chart_; }
  const std::string& label() const { return label_; }
  const Expression* expression() const { return expr_.get(); }
  bool is_zero_literal() const { return (expr_ && robinson::is_zero_literal(*expr_)) || (!expr_ && !fn_); }

 private:
  ChartPtr chart_;
  std::shared_ptr<Expression> expr_;
  Fn fn_;
  std::string label_;
};

/// Components of a form as jets at one point.
class FormJet {
 public:
  FormJet() = default;
  FormJet(int dim, int degree) : dim_(dim), degree_(degree) {
    comp_.resize(std::size_t{1} << dim);
    for (auto& c : comp_) c = Jet2::constant(dim, 0.0);
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Jet2& operator[](Mask m) const { return comp_[m]; }
  Jet2& operator[](Mask m) { return comp_[m]; }

  template <typename F>
  void for_each(F&& f) const {
    for (Mask m = 0; m < comp_.size(); ++m)
      if (mask_degree(m) == degree_) f(m, comp_[m]);
  }

  FormAtPoint value() const {
    FormAtPoint r(dim_, degree_);
    for_each([&](Mask m, const Jet2& j) { r[m] = j.value; });
    return r;
  }

  FormJet conj() const {
    FormJet r = *this;
    for (auto& c : r.comp_) c = robinson::conj(c);
    return r;
  }

  FormJet& operator+=(const FormJet& o) {
    for_each([&](Mask m, const Jet2&) { comp_[m] = comp_[m] + o.comp_[m]; });
    return *this;
  }
  FormJet& operator-=(const FormJet& o) {
    for_each([&](Mask m, const Jet2&) { comp_[m] = comp_[m] - o.comp_[m]; });
    return *this;
  }

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::vector<Jet2> comp_;
};

inline FormJet operator+(FormJet a, const FormJet& b) { return a += b; }
inline FormJet operator-(FormJet a, const FormJet& b) { return a -= b; }

inline FormJet operator*(const Jet2& s, const FormJet& a) {
  FormJet r(a.dim(), a.degree());
  a.for_each([&](Mask m, const Jet2& c) { r[m] = s * c; });
  return r;
}

inline FormJet wedge(const FormJet& a, const FormJet& b) {
  if (a.degree() + b.degree() > a.dim()) throw PreconditionError("wedge: degree exceeds dimension");
  FormJet r(a.dim(), a.degree() + b.degree());
  a.for_each([&](Mask ma, const Jet2& ca) {
    b.for_each([&](Mask mb, const Jet2& cb) {
      const int s = wedge_sign(ma, mb);
      if (s != 0) r[ma | mb] = r[ma | mb] + cplx(double(s)) * (ca * cb);
    });
  });
  return r;
}

/// Exterior derivative; the result carries jets one order lower.
inline FormJet d(const FormJet& a) {
  if (a.degree() >= a.dim()) throw PreconditionError("d: degree must be below dimension");
  FormJet r(a.dim(), a.degree() + 1);
  a.for_each([&](Mask m, const Jet2& c) {
    for (int j = 0; j < a.dim(); ++j) {
      const Mask bit = Mask{1} << j;
      const int s = wedge_sign(bit, m);
      if (s != 0) r[m | bit] = r[m | bit] + cplx(double(s)) * partial(c, j);
    }
  });
  return r;
}

inline FormJet interior(const std::vector<Jet2>& v, const FormJet& a) {
  if (a.degree() < 1) throw PreconditionError("interior: degree must be at least 1");
  FormJet r(a.dim(), a.degree() - 1);
  a.for_each([&](Mask m, const Jet2& c) {
    int pos = 0;
    for (int i : mask_indices(m)) {
      const cplx s = (pos & 1) ? -1.0 : 1.0;
      r[m & ~(Mask{1} << i)] = r[m & ~(Mask{1} << i)] + s * (v[i] * c);
      ++pos;
    }
  });
  return r;
}

inline FormJet one_form_jet(const std::vector<Jet2>& c) {
  FormJet r(static_cast<int>(c.size()), 1);
  for (std::size_t i = 0; i < c.size(); ++i) r[Mask{1} << i] = c[i];
  return r;
}

class FormField {
 public:
  FormField() = default;
  FormField(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0 || degree > chart_->dim()) throw PreconditionError("form degree out of range");
  }

  const ChartPtr& chart_ptr() const { return chart_; }
  const Chart& chart() const { return *chart_; }
  int degree() const { return degree_; }

  void set(Mask m, ScalarField f) {
    if (mask_degree(m) != degree_) throw PreconditionError("component degree mismatch");
    comp_[m] = std::move(f);
  }
  /// Adds `f` times the basis form e_{idx...}, for an unordered index list.
  void add(std::vector<int> idx, const ScalarField& f);

  const std::map<Mask, ScalarField>& components() const { return comp_; }

  FormJet jet(std::span<const double> p) const {
    FormJet r(chart_->dim(), degree_);
    for (const auto& [m, f] : comp_) r[m] = f.jet(p);
    return r;
  }
  FormAtPoint at(std::span<const double> p) const { return jet(p).value(); }

  /// Field given by an arbitrary jet-producing function.
  static FormField from_jet_fn(ChartPtr chart, int degree,
                               std::function<FormJet(std::span<const double>)> fn);

 private:
  ChartPtr chart_;
  int degree_ = 0;
  std::map<Mask, ScalarField> comp_;
};

inline void FormField::add(std::vector<int> idx, const ScalarField& f) {
  Mask m = 0;
  int sign = 1;
  for (int i : idx) {
    const Mask bit = Mask{1} << i;
    if (m & bit) return;
    sign *= wedge_sign(m, bit);
    m |= bit;
  }
  if (mask_degree(m) != degree_) throw PreconditionError("component degree mismatch");
  auto it = comp_.find(m);
  ScalarField prev = it == comp_.end() ? ScalarField() : it->second;
  const cplx s = double(sign);
  if (prev.is_zero_literal() && f.expression() && sign == 1) {
    comp_[m] = f;
    return;
  }
  if (prev.expression() && f.expression()) {
    Expression e = *prev.expression() + s * *f.expression();
    comp_[m] = ScalarField(e);
    return;
  }
  comp_[m] = ScalarField(
      chart_, [prev, f, s](std::span<const double> p) { return prev.jet(p) + s * f.jet(p); },
      f.label());
}

inline FormField FormField::from_jet_fn(ChartPtr chart, int degree,
                                        std::function<FormJet(std::span<const double>)> fn) {
  FormField r(chart, degree);
  auto shared = std::make_shared<std::function<FormJet(std::span<const double>)>>(std::move(fn));
  for (Mask m = 0; m < (Mask{1} << chart->dim()); ++m) {
    if (mask_degree(m) != degree) continue;
    r.comp_[m] = ScalarField(
        chart, [shared, m](std::span<const double> p) { return (*shared)(p)[m]; }, "<derived>");
  }
  return r;
}

class VectorField {
 public:
  VectorField() = default;
  VectorField(ChartPtr chart, std::vector<ScalarField> comps)
      : chart_(std::move(chart)), comp_(std::move(comps)) {
    if (static_cast<int>(comp_.size()) != chart_->dim())
      throw PreconditionError("vector field needs one component per coordinate");
  }

  const ChartPtr& chart_ptr() const { return chart_; }
  const std::vector<ScalarField>& components() const { return comp_; }

  std::vector<Jet2> jet(std::span<const double> p) const {
    std::vector<Jet2> r;
    r.reserve(comp_.size());
    for (const auto& c : comp_) r.push_back(c.jet(p));
    return r;
  }
  CVec at(std::span<const double> p) const {
    CVec v(comp_.size());
    for (std::size_t i = 0; i < comp_.size(); ++i) v(i) = comp_[i].value(p);
    return v;
  }

  /// f * k for a scalar field f.
  VectorField scaled(const ScalarField& f) const {
    std::vector<ScalarField> c;
    for (const auto& k : comp_)
      c.emplace_back(chart_, [k, f](std::span<const double> p) { return f.jet(p) * k.jet(p); });
    return VectorField(chart_, std::move(c));
  }

 private:
  ChartPtr chart_;
  std::vector<ScalarField> comp_;
};

enum class Signature { Lorentzian, Euclidean };

/// Axis-aligned box of sample coordinates.
struct DomainBox {
  std::vector<std::pair<double, double>> bounds;

  std::vector<Point> sample(int count, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
      Point p;
      for (const auto& [lo, hi] : bounds) {
        std::uniform_real_distribution<double> u(lo, hi);
        p.push_back(lo == hi ? lo : u(rng));
      }
      out.push_back(std::move(p));
    }
    return out;
  }
};

class MetricField {
 public:
  MetricField() = default;
  MetricField(ChartPtr chart, Signature sig = Signature::Lorentzian)
      : chart_(std::move(chart)), sig_(sig) {
    const int n = chart_->dim();
    comp_.assign(n * n, ScalarField::constant(chart_, 0.0));
  }

  const ChartPtr& chart_ptr() const { return chart_; }
  const Chart& chart() const { return *chart_; }
  int dim() const { return chart_->dim(); }
  Signature signature() const { return sig_; }
  void set_signature(Signature s) { sig_ = s; }

  const ScalarField& operator()(int i, int j) const { return comp_[i * dim() + j]; }
  void set(int i, int j, const ScalarField& f) {
    comp_[i * dim() + j] = f;
    comp_[j * dim() + i] = f;
  }

  /// Jets of all components, symmetric.
  std::vector<Jet2> jets(std::span<const double> p) const {
    const int n = dim();
    std::vector<Jet2> r(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) r[i * n + j] = r[j * n + i] = comp_[i * n + j].jet(p);
    return r;
  }

  MetricAtPoint at(std::span<const double> p) const {
    const int n = dim();
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = comp_[i * n + j].value(p);
    return MetricAtPoint(g);
  }

 private:
  ChartPtr chart_;
  Signature sig_ = Signature::Lorentzian;
  std::vector<ScalarField> comp_;
};

/// Maps a source chart into a target chart; components are real-valued.
class ChartMap {
 public:
  ChartMap() = default;
  ChartMap(ChartPtr source, ChartPtr target, std::vector<ScalarField> comps)
      : src_(std::move(source)), tgt_(std::move(target)), comp_(std::move(comps)) {
    if (static_cast<int>(comp_.size()) != tgt_->dim())
      throw PreconditionError("chart map needs one component per target coordinate");
  }

  const ChartPtr& source() const { return src_; }
  const ChartPtr& target() const { return tgt_; }
  const std::vector<ScalarField>& components() const { return comp_; }

  std::vector<Jet2> jets(std::span<const double> p) const {
    std::vector<Jet2> r;
    for (const auto& c : comp_) r.push_back(c.jet(p));
    return r;
  }

  Point image(std::span<const double> p) const {
    Point q;
    for (const auto& c : comp_) {
      const cplx v = c.value(p);
      if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
        throw PreconditionError("chart map component is not real");
      q.push_back(v.real());
    }
    return q;
  }

  /// Rows: target coordinates, columns: source coordinates.
  CMat jacobian(std::span<const double> p) const {
    CMat J(tgt_->dim(), src_->dim());
    for (int a = 0; a < tgt_->dim(); ++a) {
      Jet2 j = comp_[a].jet(p);
      for (int i = 0; i < src_->dim(); ++i) J(a, i) = j.grad[i];
    }
    return J;
  }

  /// g o f, as a map source -> target2.
  ChartMap then(const ChartMap& g) const {
    if (g.src_->coord_names() != tgt_->coord_names())
      throw PreconditionError("chart maps do not compose");
    std::vector<ScalarField> out;
    auto self = std::make_shared<ChartMap>(*this);
    for (const auto& gc : g.comp_) {
      out.emplace_back(src_, [self, gc](std::span<const double> p) {
        std::vector<Jet2> inner = self->jets(p);
        for (auto& j : inner) j = re(j);
        Point q;
        for (const auto& j : inner) q.push_back(j.value.real());
        return compose(gc.jet(q), inner);
      });
    }
    return ChartMap(src_, g.tgt_, std::move(out));
  }

 private:
  ChartPtr src_, tgt_;
  std::vector<ScalarField> comp_;
};

// ---------------------------------------------------------------------------
// Calculus at a point.

inline FormAtPoint d(const FormField& a, std::span<const double> p) { return d(a.jet(p)).value(); }

/// d as a field (jets one order lower than those of a).
inline FormField d(const FormField& a) {
  FormField src = a;
  return FormField::from_jet_fn(a.chart_ptr(), a.degree() + 1,
                                [src](std::span<const double> p) { return d(src.jet(p)); });
}

/// d(d a) at p, assembled from second partials and normalized by the
/// largest second partial. Zero up to rounding for any smooth field.
inline double dd_residual(const FormField& a, std::span<const double> p) {
  if (a.degree() + 2 > a.chart().dim()) return 0.0;
  const FormJet j = a.jet(p);
  double scale = 1.0;
  j.for_each([&](Mask, const Jet2& c) {
    for (int x = 0; x < j.dim(); ++x)
      for (int y = 0; y < j.dim(); ++y) scale = std::max(scale, std::abs(c.dd(x, y)));
  });
  return d(d(j)).value().max_abs() / scale;
}

/// (L_k g)_{mn} = k^a d_a g_{mn} + g_{an} d_m k^a + g_{ma} d_n k^a.
inline CMat lie_metric(const VectorField& k, const MetricField& g, std::span<const double> p) {
  const int n = g.dim();
  const auto gj = g.jets(p);
  const auto kj = k.jet(p);
  CMat L(n, n);
  for (int m = 0; m < n; ++m)
    for (int q = m; q < n; ++q) {
      cplx s = 0.0;
      for (int a = 0; a < n; ++a) {
        s += kj[a].value * gj[m * n + q].grad[a];
        s += gj[a * n + q].value * kj[a].grad[m];
        s += gj[m * n + a].value * kj[a].grad[q];
      }
      L(m, q) = L(q, m) = s;
    }
  return L;
}

/// Jets of g(k), the covector dual to k.
inline std::vector<Jet2> lower_jet(const VectorField& k, const MetricField& g,
                                   std::span<const double> p) {
  const int n = g.dim();
  const auto gj = g.jets(p);
  const auto kj = k.jet(p);
  std::vector<Jet2> r(n, Jet2::constant(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) r[b] = r[b] + gj[a * n + b] * kj[a];
  return r;
}

/// Cartan formula k _| da + d(k _| a).
inline FormAtPoint lie_form(const VectorField& k, const FormField& a, std::span<const double> p) {
  const FormJet aj = a.jet(p);
  const auto kj = k.jet(p);
  FormAtPoint r(a.chart().dim(), a.degree());
  if (a.degree() < a.chart().dim()) {
    CVec kv(kj.size());
    for (std::size_t i = 0; i < kj.size(); ++i) kv(i) = kj[i].value;
    r += interior(kv, d(aj).value());
  }
  if (a.degree() >= 1) r += d(interior(kj, aj)).value();
  return r;
}

/// Component formula (L_k a)_I = k^j d_j a_I + sum over slots of a_{..j..} d_i k^j.
inline FormAtPoint lie_form_direct(const VectorField& k, const FormField& a,
                                   std::span<const double> p) {
  const FormJet aj = a.jet(p);
  const auto kj = k.jet(p);
  const int n = a.chart().dim();
  FormAtPoint full_a = aj.value();
  FormAtPoint r(n, a.degree());
  r.for_each([&](Mask m, cplx) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += kj[j].value * aj[m].grad[j];
    const auto idx = mask_indices(m);
    for (std::size_t slot = 0; slot < idx.size(); ++slot) {
      for (int j = 0; j < n; ++j) {
        std::vector<int> rep = idx;
        rep[slot] = j;
        cplx c;
        switch (rep.size()) {
          case 1: c = full_a.at({rep[0]}); break;
          case 2: c = full_a.at({rep[0], rep[1]}); break;
          case 3: c = full_a.at({rep[0], rep[1], rep[2]}); break;
          default: {
            Mask mm = 0;
            int sign = 1;
            bool dup = false;
            for (int i : rep) {
              const Mask bit = Mask{1} << i;
              if (mm & bit) dup = true;
              else sign *= wedge_sign(mm, bit);
              mm |= bit;
            }
            c = dup ? cplx{} : double(sign) * full_a[mm];
          }
        }
        s += c * kj[j].grad[idx[slot]];
      }
    }
    r[m] = s;
  });
  return r;
}

/// Pullback of a form on the target along f, at a source point.
inline FormAtPoint pullback(const ChartMap& f, const FormField& a, std::span<const double> p) {
  const Point q = f.image(p);
  const FormAtPoint aq = a.at(q);
  const CMat J = f.jacobian(p);
  const int n = f.source()->dim();
  FormAtPoint r(n, a.degree());
  r.for_each([&](Mask mi, cplx) {
    cplx s = 0.0;
    const auto cols = mask_indices(mi);
    aq.for_each([&](Mask ma, cplx c) {
      if (c != cplx{}) s += c * pointalg_detail::minor_det(J, mask_indices(ma), cols);
    });
    r[mi] = s;
  });
  return r;
}

/// Pullback as a field; component jets are of order one.
inline FormField pullback(const ChartMap& f, const FormField& a) {
  auto fm = std::make_shared<ChartMap>(f);
  FormField src = a;
  const int n = f.source()->dim();
  const int k = a.degree();
  return FormField::from_jet_fn(f.source(), k, [fm, src, n, k](std::span<const double> p) {
    std::vector<Jet2> inner = fm->jets(p);
    for (auto& j : inner) j = re(j);
    Point q;
    for (const auto& j : inner) q.push_back(j.value.real());
    // Jacobian entries as order-1 jets
    std::vector<std::vector<Jet2>> J(inner.size());
    for (std::size_t a2 = 0; a2 < inner.size(); ++a2)
      for (int i = 0; i < n; ++i) J[a2].push_back(partial(inner[a2], i));
    FormJet r(n, k);
    const FormJet aq = src.jet(q);
    aq.for_each([&](Mask ma, const Jet2& c) {
      if (c.value == cplx{} && c.order >= 0) {
        bool all0 = true;
        for (int i = 0; i < c.dim; ++i)
          if (c.grad[i] != cplx{}) all0 = false;
        if (all0) return;
      }
      const Jet2 cc = compose(c, inner);
      const auto rows = mask_indices(ma);
      r.for_each([&](Mask mi, const Jet2&) {
        const auto cols = mask_indices(mi);
        // determinant of the k x k minor by permutation expansion
        std::vector<int> perm(k);
        for (int t = 0; t < k; ++t) perm[t] = t;
        Jet2 det = Jet2::constant(n, 0.0);
        det.order = 1;
        do {
          Jet2 term = Jet2::constant(n, double(pointalg_detail::perm_sign(perm)));
          for (int t = 0; t < k; ++t) term = term * J[rows[t]][cols[perm[t]]];
          det = det + term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        r[mi] = r[mi] + cc * det;
      });
    });
    return r;
  });
}

/// (1/sqrt|g|) d_m (sqrt|g| k^m) = d_m k^m + (1/2) k^m g^{ab} d_m g_{ab}.
inline cplx divergence(const VectorField& k, const MetricField& g, std::span<const double> p) {
  const int n = g.dim();
  const MetricAtPoint gm = g.at(p);
  const auto gj = g.jets(p);
  const auto kj = k.jet(p);
  cplx s = 0.0;
  for (int m = 0; m < n; ++m) {
    s += kj[m].grad[m];
    cplx tr = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) tr += gm.g_inv(a, b) * gj[a * n + b].grad[m];
    s += 0.5 * kj[m].value * tr;
  }
  return s;
}

}  // namespace robinson

namespace robinson {

/// Coordinate differential dx^i as a constant form field.
inline FormField coordinate_differential(const ChartPtr& chart, int i) {
  FormField f(chart, 1);
  f.set(Mask{1} << i, ScalarField::constant(chart, 1.0));
  return f;
}

/// dw = dx + i dy (or its conjugate) for a declared complex pair.
inline FormField complex_differential(const ChartPtr& chart, const std::string& pair_name,
                                      bool conjugate = false) {
  const ComplexPair* p = chart->pair(pair_name);
  if (!p) throw PreconditionError("chart has no complex pair " + pair_name);
  FormField f(chart, 1);
  f.set(Mask{1} << p->x, ScalarField::constant(chart, 1.0));
  f.set(Mask{1} << p->y, ScalarField::constant(chart, cplx(0.0, conjugate ? -1.0 : 1.0)));
  return f;
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (a.is_zero_literal()) return b;
  if (b.is_zero_literal()) return a;
  if (a.expression() && b.expression()) return ScalarField(*a.expression() + *b.expression());
  return ScalarField(a.chart_ptr(), [a, b](std::span<const double> p) { return a.jet(p) + b.jet(p); });
}

inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  if (a.expression() && b.expression()) return ScalarField(*a.expression() * *b.expression());
  return ScalarField(a.chart_ptr(), [a, b](std::span<const double> p) { return a.jet(p) * b.jet(p); });
}

inline ScalarField conj(const ScalarField& a) {
  if (a.expression()) return ScalarField(conj(*a.expression()));
  return ScalarField(a.chart_ptr(), [a](std::span<const double> p) { return robinson::conj(a.jet(p)); });
}

inline FormField conj(const FormField& a) {
  FormField r(a.chart_ptr(), a.degree());
  for (const auto& [m, f] : a.components()) r.set(m, conj(f));
  return r;
}

inline FormField wedge(const FormField& a, const FormField& b) {
  FormField fa = a, fb = b;
  return FormField::from_jet_fn(a.chart_ptr(), a.degree() + b.degree(),
                                [fa, fb](std::span<const double> p) { return wedge(fa.jet(p), fb.jet(p)); });
}

inline FormField operator*(const ScalarField& s, const FormField& a) {
  FormField r(a.chart_ptr(), a.degree());
  for (const auto& [m, f] : a.components()) r.set(m, s * f);
  return r;
}

inline FormField operator+(const FormField& a, const FormField& b) {
  if (a.degree() != b.degree()) throw PreconditionError("form sum: degree mismatch");
  FormField r = a;
  for (const auto& [m, f] : b.components()) {
    auto it = a.components().find(m);
    r.set(m, it == a.components().end() ? f : it->second + f);
  }
  return r;
}

inline FormField operator-(const FormField& a, const FormField& b) {
  return a + ScalarField::constant(b.chart_ptr(), -1.0) * b;
}

/// One term coef * (a b) of a metric, with the symmetrized product
/// a b = (a (x) b + b (x) a) / 2.
struct MetricTerm {
  ScalarField coef;
  FormField a, b;
};

inline MetricField metric_from_terms(const ChartPtr& chart, std::vector<MetricTerm> terms,
                                     Signature sig = Signature::Lorentzian) {
  MetricField g(chart, sig);
  const int n = chart->dim();
  auto shared = std::make_shared<std::vector<MetricTerm>>(std::move(terms));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      bool any = false;
      for (const auto& t : *shared) {
        auto has = [&](const FormField& f, int k) { return f.components().count(Mask{1} << k) > 0; };
        if ((has(t.a, i) && has(t.b, j)) || (has(t.a, j) && has(t.b, i))) any = true;
      }
      if (!any) continue;
      g.set(i, j, ScalarField(chart, [shared, i, j, n](std::span<const double> p) {
              Jet2 s = Jet2::constant(n, 0.0);
              for (const auto& t : *shared) {
                const FormJet a = t.a.jet(p), b = t.b.jet(p);
                const Jet2 sym = a[Mask{1} << i] * b[Mask{1} << j] + a[Mask{1} << j] * b[Mask{1} << i];
                s = s + 0.5 * (t.coef.jet(p) * sym);
              }
              return s;
            }));
    }
  return g;
}

}  // namespace robinson
