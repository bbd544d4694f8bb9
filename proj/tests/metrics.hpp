#pragma once

// Small metric zoo for unit tests that should not depend on the model parser.

#include "robinson/fields.hpp"

namespace testmetrics {

using namespace robinson;

inline ChartPtr uvxy() { return Chart::make("mink", {"u", "v", "x", "y"}, {{"w", "x", "y"}}); }

inline ScalarField S(const ChartPtr& c, const std::string& s) { return ScalarField(parse(s, c)); }
inline FormField dxi(const ChartPtr& c, int i) { return coordinate_differential(c, i); }
inline FormField dw(const ChartPtr& c) { return complex_differential(c, "w"); }
inline FormField dwb(const ChartPtr& c) { return complex_differential(c, "w", true); }

inline VectorField vec(const ChartPtr& c, std::vector<std::string> s) {
  std::vector<ScalarField> comps;
  for (auto& x : s) comps.push_back(S(c, x));
  return VectorField(c, comps);
}

inline MetricField minkowski(const ChartPtr& c) {
  return metric_from_terms(c, {{S(c, "1"), dxi(c, 0), dxi(c, 1)}, {S(c, "1"), dw(c), dwb(c)}});
}

inline FormField hyperquadric_kappa(const ChartPtr& c) {
  return dxi(c, 0) + S(c, "i*w") * dwb(c) + S(c, "-i*conj(w)") * dw(c);
}

inline MetricField robinson_congruence(const ChartPtr& c) {
  return metric_from_terms(c, {{S(c, "1"), hyperquadric_kappa(c), dxi(c, 1)}, {S(c, "v^2 + 1"), dw(c), dwb(c)}});
}

inline MetricField plane_wave(const ChartPtr& c, const std::string& f) {
  return metric_from_terms(c, {{S(c, f), dxi(c, 0), dxi(c, 0)},
                               {S(c, "2"), dxi(c, 0), dxi(c, 1)},
                               {S(c, "1"), dxi(c, 2), dxi(c, 2)},
                               {S(c, "1"), dxi(c, 3), dxi(c, 3)}});
}

inline MetricField schwarzschild(const ChartPtr& c) {
  return metric_from_terms(c, {{S(c, "2/v - 1"), dxi(c, 0), dxi(c, 0)},
                               {S(c, "2"), dxi(c, 0), dxi(c, 1)},
                               {S(c, "v^2*(1 + w*conj(w)/4)^(-2)"), dw(c), dwb(c)}});
}

inline ChartPtr goedel_chart() { return Chart::make("goedel", {"U", "V", "X", "Y"}, {{"w", "X", "Y"}}); }

/// (dX^2 + dY^2 - 2 (Y dU - dX)(Y dV - dX)) / Y^2
inline MetricField goedel(const ChartPtr& c) {
  FormField a = S(c, "Y") * dxi(c, 0) + S(c, "-1") * dxi(c, 2);
  FormField b = S(c, "Y") * dxi(c, 1) + S(c, "-1") * dxi(c, 2);
  return metric_from_terms(c, {{S(c, "Y^(-2)"), dxi(c, 2), dxi(c, 2)},
                               {S(c, "Y^(-2)"), dxi(c, 3), dxi(c, 3)},
                               {S(c, "-2*Y^(-2)"), a, b}});
}

/// lambda kappa + mu mubar, kappa = du + i/2 (w dwbar - wbar dw), lambda = dv - i/2 (...), mu = (w + wbar) dw
inline MetricField threecong(const ChartPtr& c) {
  FormField t = S(c, "i/2*w") * dwb(c) + S(c, "-i/2*conj(w)") * dw(c);
  FormField kappa = dxi(c, 0) + t;
  FormField lambda = dxi(c, 1) + S(c, "-1") * t;
  return metric_from_terms(c, {{S(c, "1"), lambda, kappa}, {S(c, "(w + conj(w))^2"), dw(c), dwb(c)}});
}

inline DomainBox box4(double vlo, double vhi) {
  DomainBox b;
  b.bounds = {{-1, 1}, {vlo, vhi}, {-1, 1}, {-1, 1}};
  return b;
}

}  // namespace testmetrics
