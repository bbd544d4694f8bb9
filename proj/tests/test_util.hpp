#pragma once

// Independent oracles shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <vector>

#include "robinson/exprjet.hpp"

namespace testutil {

using robinson::cplx;

struct FdJet {
  std::vector<cplx> grad;
  std::vector<cplx> hess;  // row-major dim x dim
};

/// Central differences of a value-only evaluator.
template <typename F>
FdJet finite_difference_fn(F&& f, std::vector<double> p, double h) {
  const int n = static_cast<int>(p.size());
  FdJet r;
  r.grad.resize(n);
  r.hess.resize(n * n);
  const cplx f0 = f(p);
  for (int i = 0; i < n; ++i) {
    auto q = p;
    q[i] = p[i] + h;
    const cplx fp = f(q);
    q[i] = p[i] - h;
    const cplx fm = f(q);
    r.grad[i] = (fp - fm) / (2 * h);
    r.hess[i * n + i] = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto q = p;
      auto at = [&](double si, double sj) {
        q = p;
        q[i] += si * h;
        q[j] += sj * h;
        return f(q);
      };
      const cplx v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
      r.hess[i * n + j] = r.hess[j * n + i] = v;
    }
  return r;
}

inline FdJet finite_difference(const robinson::Expression& e, const std::vector<double>& p, double h) {
  return finite_difference_fn([&](const std::vector<double>& q) { return e.value(q); }, p, h);
}

/// Relative disagreement between analytic jets and finite differences.
/// Gradient entries use h = 1e-5; second derivatives are differenced from
/// the analytic gradient with the same step, which keeps the oracle
/// independent of the Hessian code path while avoiding h^2 cancellation.
template <typename JetFn>
double jet_fd_error_fn(JetFn&& jet, const std::vector<double>& p, double h = 1e-5) {
  const int n = static_cast<int>(p.size());
  const robinson::Jet2 j = jet(p);
  double scale = 1.0 + std::abs(j.value);
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(j.grad[i]));
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    auto q = p;
    q[i] = p[i] + h;
    const robinson::Jet2 jp = jet(q);
    q[i] = p[i] - h;
    const robinson::Jet2 jm = jet(q);
    const cplx g = (jp.value - jm.value) / (2 * h);
    err = std::max(err, std::abs(g - j.grad[i]) / scale);
    double hs = 1.0;
    for (int k = 0; k < n; ++k) hs = std::max(hs, std::abs(j.dd(i, k)));
    for (int k = 0; k < n; ++k) {
      const cplx hk = (jp.grad[k] - jm.grad[k]) / (2 * h);
      err = std::max(err, std::abs(hk - j.dd(i, k)) / hs);
    }
  }
  return err;
}

inline double jet_fd_error(const robinson::Expression& e, const std::vector<double>& p, double h = 1e-5) {
  return jet_fd_error_fn([&](const std::vector<double>& q) { return e.jet(q); }, p, h);
}

}  // namespace testutil
