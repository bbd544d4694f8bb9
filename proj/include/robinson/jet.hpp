#pragma once

// Second-order jets over a real coordinate chart with complex values.
//
// A Jet2 carries the value of a function together with its gradient and its
// Hessian with respect to the real chart coordinates. Arithmetic on jets
// implements the sum, product and chain rules truncated at order two. A jet
// whose `order` is 1 has a meaningless Hessian; that order propagates through
// arithmetic so that consumers needing second derivatives can refuse it.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace robinson {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 6;

struct Jet2 {
  int dim = 0;
  int order = 2;
  cplx value{};
  std::array<cplx, kMaxDim> grad{};
  std::array<cplx, kMaxDim * kMaxDim> hess{};

  cplx d(int i) const { return grad[i]; }
  cplx dd(int i, int j) const { return hess[i * kMaxDim + j]; }
  cplx& dd_ref(int i, int j) { return hess[i * kMaxDim + j]; }

  static Jet2 constant(int dim, cplx c) {
    Jet2 j;
    j.dim = dim;
    j.value = c;
    return j;
  }

  /// The coordinate function x^index evaluated at `at`.
  static Jet2 coordinate(int dim, int index, double at) {
    Jet2 j = constant(dim, at);
    j.grad[index] = 1.0;
    return j;
  }
};

namespace jet_detail {

inline void set_sym(Jet2& j, int a, int b, cplx v) {
  j.dd_ref(a, b) = v;
  j.dd_ref(b, a) = v;
}

}  // namespace jet_detail

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.dim = a.dim;
  r.order = std::min(a.order, b.order);
  r.value = a.value + b.value;
  for (int i = 0; i < a.dim; ++i) r.grad[i] = a.grad[i] + b.grad[i];
  for (int i = 0; i < a.dim; ++i)
    for (int j = i; j < a.dim; ++j)
      jet_detail::set_sym(r, i, j, a.dd(i, j) + b.dd(i, j));
  return r;
}

inline Jet2 operator-(const Jet2& a) {
  Jet2 r = a;
  r.value = -a.value;
  for (auto& g : r.grad) g = -g;
  for (auto& h : r.hess) h = -h;
  return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.dim = a.dim;
  r.order = std::min(a.order, b.order);
  r.value = a.value - b.value;
  for (int i = 0; i < a.dim; ++i) r.grad[i] = a.grad[i] - b.grad[i];
  for (int i = 0; i < a.dim; ++i)
    for (int j = i; j < a.dim; ++j)
      jet_detail::set_sym(r, i, j, a.dd(i, j) - b.dd(i, j));
  return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.dim = a.dim;
  r.order = std::min(a.order, b.order);
  r.value = a.value * b.value;
  for (int i = 0; i < a.dim; ++i)
    r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  for (int i = 0; i < a.dim; ++i)
    for (int j = i; j < a.dim; ++j)
      jet_detail::set_sym(r, i, j,
                          a.dd(i, j) * b.value + a.grad[i] * b.grad[j] +
                              a.grad[j] * b.grad[i] + a.value * b.dd(i, j));
  return r;
}

inline Jet2 operator*(cplx c, const Jet2& a) {
  Jet2 r = a;
  r.value *= c;
  for (int i = 0; i < a.dim; ++i) r.grad[i] *= c;
  for (auto& h : r.hess) h *= c;
  return r;
}
inline Jet2 operator*(const Jet2& a, cplx c) { return c * a; }

inline Jet2 operator+(const Jet2& a, cplx c) {
  Jet2 r = a;
  r.value += c;
  return r;
}
inline Jet2 operator+(cplx c, const Jet2& a) { return a + c; }
inline Jet2 operator-(const Jet2& a, cplx c) { return a + (-c); }
inline Jet2 operator-(cplx c, const Jet2& a) { return (-a) + c; }

/// Chain rule for a scalar holomorphic function f with f(a), f'(a), f''(a)
/// already evaluated at a.value.
inline Jet2 compose_holomorphic(const Jet2& a, cplx f0, cplx f1, cplx f2) {
  Jet2 r;
  r.dim = a.dim;
  r.order = a.order;
  r.value = f0;
  for (int i = 0; i < a.dim; ++i) r.grad[i] = f1 * a.grad[i];
  for (int i = 0; i < a.dim; ++i)
    for (int j = i; j < a.dim; ++j)
      jet_detail::set_sym(r, i, j,
                          f2 * a.grad[i] * a.grad[j] + f1 * a.dd(i, j));
  return r;
}

inline Jet2 reciprocal(const Jet2& a) {
  const cplx inv = 1.0 / a.value;
  return compose_holomorphic(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
inline Jet2 operator/(const Jet2& a, cplx c) { return (1.0 / c) * a; }
inline Jet2 operator/(cplx c, const Jet2& a) { return c * reciprocal(a); }

inline Jet2 exp(const Jet2& a) {
  const cplx e = std::exp(a.value);
  return compose_holomorphic(a, e, e, e);
}

inline Jet2 log(const Jet2& a) {
  const cplx inv = 1.0 / a.value;
  return compose_holomorphic(a, std::log(a.value), inv, -inv * inv);
}

inline Jet2 sqrt(const Jet2& a) {
  const cplx s = std::sqrt(a.value);
  return compose_holomorphic(a, s, 0.5 / s, -0.25 / (s * a.value));
}

inline Jet2 sin(const Jet2& a) {
  const cplx s = std::sin(a.value), c = std::cos(a.value);
  return compose_holomorphic(a, s, c, -s);
}

inline Jet2 cos(const Jet2& a) {
  const cplx s = std::sin(a.value), c = std::cos(a.value);
  return compose_holomorphic(a, c, -s, -c);
}

// Derivatives are taken with respect to real coordinates, so conjugation and
// real/imaginary parts act componentwise.
inline Jet2 conj(const Jet2& a) {
  Jet2 r = a;
  r.value = std::conj(a.value);
  for (auto& g : r.grad) g = std::conj(g);
  for (auto& h : r.hess) h = std::conj(h);
  return r;
}

inline Jet2 re(const Jet2& a) {
  Jet2 r = a;
  r.value = a.value.real();
  for (auto& g : r.grad) g = g.real();
  for (auto& h : r.hess) h = h.real();
  return r;
}

inline Jet2 im(const Jet2& a) {
  Jet2 r = a;
  r.value = a.value.imag();
  for (auto& g : r.grad) g = g.imag();
  for (auto& h : r.hess) h = h.imag();
  return r;
}

/// a^n for n >= 1 by repeated multiplication.
inline Jet2 pow_positive(const Jet2& a, int n) {
  Jet2 r = a;
  for (int k = 1; k < n; ++k) r = r * a;
  return r;
}

/// The order-1 jet of the partial derivative d/dx^index of `a`.
inline Jet2 partial(const Jet2& a, int index) {
  Jet2 r;
  r.dim = a.dim;
  r.order = a.order - 1;
  r.value = a.grad[index];
  for (int j = 0; j < a.dim; ++j) r.grad[j] = a.dd(index, j);
  return r;
}

/// Multivariate chain rule: `outer` is a jet over an m-dimensional real chart
/// evaluated at the point (inner[0].value, ..., inner[m-1].value); each inner
/// jet is a real-valued function over the source chart.
template <typename InnerRange>
Jet2 compose(const Jet2& outer, const InnerRange& inner) {
  const int m = static_cast<int>(std::size(inner));
  const int n = std::begin(inner)->dim;
  Jet2 r;
  r.dim = n;
  r.order = outer.order;
  r.value = outer.value;
  for (const auto& g : inner) r.order = std::min(r.order, g.order);
  for (int i = 0; i < n; ++i) {
    cplx s = 0.0;
    for (int k = 0; k < m; ++k) s += outer.grad[k] * inner[k].grad[i];
    r.grad[i] = s;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < m; ++k) {
        s += outer.grad[k] * inner[k].dd(i, j);
        for (int l = 0; l < m; ++l)
          s += outer.dd(k, l) * inner[k].grad[i] * inner[l].grad[j];
      }
      jet_detail::set_sym(r, i, j, s);
    }
  }
  return r;
}

inline bool is_finite(const Jet2& a) {
  auto fin = [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
  if (!fin(a.value)) return false;
  for (int i = 0; i < a.dim; ++i)
    if (!fin(a.grad[i])) return false;
  if (a.order >= 2)
    for (int i = 0; i < a.dim; ++i)
      for (int j = 0; j < a.dim; ++j)
        if (!fin(a.dd(i, j))) return false;
  return true;
}

}  // namespace robinson
