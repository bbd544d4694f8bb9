#pragma once

// Dirac matrices in dimension four, chiral spinors, charge conjugation, and
// the algebraic classification of Weyl tensors by the root multiplicities of
// the associated binary quartic.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "robinson/curvature.hpp"
#include "robinson/pointalg.hpp"

namespace robinson {

struct CliffordRep {
  Signature signature = Signature::Euclidean;
  std::array<CMat, 4> gamma;
  CMat Gamma;  // chirality, Gamma^2 = id
  CMat B;      // B gamma_m = gamma_m^T B
  CMat C;      // C gamma_m = conj(gamma_m) C, normalized so C conj(C) = -+id
  CMat splus;  // 4 x 2, orthonormal basis of Gamma = +1
  CMat sminus;

  /// g_{mn}: identity, with g_44 = -1 in the Lorentzian case.
  CMat metric() const {
    CMat g = CMat::Identity(4, 4);
    if (signature == Signature::Lorentzian) g(3, 3) = -1.0;
    return g;
  }

  CMat gamma_of(const CVec& w) const {
    CMat r = CMat::Zero(4, 4);
    for (int m = 0; m < 4; ++m) r += w(m) * gamma[m];
    return r;
  }

  /// 2x2 restriction of B to S+ (antisymmetric).
  CMat epsilon() const { return splus.transpose() * B * splus; }
};

namespace algclass_detail {

inline CMat pauli(int k) {
  CMat s = CMat::Zero(2, 2);
  const cplx i(0, 1);
  if (k == 1) s << 0, 1, 1, 0;
  if (k == 2) s << 0, -i, i, 0;
  if (k == 3) s << 1, 0, 0, -1;
  return s;
}

inline CMat block(const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
  CMat r(4, 4);
  r.topLeftCorner(2, 2) = a;
  r.topRightCorner(2, 2) = b;
  r.bottomLeftCorner(2, 2) = c;
  r.bottomRightCorner(2, 2) = d;
  return r;
}

/// One-dimensional solution X of sum_m (X L_m - R_m X) = 0 for all m.
inline CMat intertwiner(const std::array<CMat, 4>& L, const std::array<CMat, 4>& R) {
  CMat sys = CMat::Zero(64, 16);
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const int row = m * 16 + i * 4 + j;
        // (X L)_{ij} - (R X)_{ij}
        for (int k = 0; k < 4; ++k) {
          sys(row, i * 4 + k) += L[m](k, j);
          sys(row, k * 4 + j) -= R[m](i, k);
        }
      }
  CMat ns = nullspace(sys);
  if (ns.cols() != 1) throw SolverError("intertwiner: expected a one-dimensional solution space");
  CMat X(4, 4);
  for (int i = 0; i < 16; ++i) X(i / 4, i % 4) = ns(i, 0);
  return X;
}

}  // namespace algclass_detail

inline CliffordRep build_clifford(Signature sig) {
  using namespace algclass_detail;
  const cplx i(0, 1);
  const CMat Z = CMat::Zero(2, 2), Id = CMat::Identity(2, 2);
  CliffordRep r;
  r.signature = sig;
  for (int k = 1; k <= 3; ++k) r.gamma[k - 1] = block(Z, -i * pauli(k), i * pauli(k), Z);
  r.gamma[3] = block(Z, Id, Id, Z);
  if (sig == Signature::Lorentzian) r.gamma[3] *= i;
  const CMat g5 = r.gamma[0] * r.gamma[1] * r.gamma[2] * r.gamma[3];
  r.Gamma = sig == Signature::Lorentzian ? CMat(i * g5) : g5;

  std::array<CMat, 4> conj_g, trans_g;
  for (int m = 0; m < 4; ++m) {
    conj_g[m] = r.gamma[m].conjugate();
    trans_g[m] = r.gamma[m].transpose();
  }
  r.C = intertwiner(r.gamma, conj_g);
  const CMat cc = r.C * r.C.conjugate();
  r.C /= std::sqrt(std::abs(cc(0, 0)));
  r.B = intertwiner(r.gamma, trans_g);
  r.B /= r.B.cwiseAbs().maxCoeff();

  // Gamma is diagonal in this representation; take the coordinate basis
  r.splus = CMat::Zero(4, 2);
  r.sminus = CMat::Zero(4, 2);
  int np = 0, nm = 0;
  for (int k = 0; k < 4; ++k) {
    if (std::abs(r.Gamma(k, k) - 1.0) < 1e-12 && np < 2) r.splus(k, np++) = 1.0;
    else if (std::abs(r.Gamma(k, k) + 1.0) < 1e-12 && nm < 2) r.sminus(k, nm++) = 1.0;
  }
  if (np != 2 || nm != 2) throw SolverError("clifford: chirality operator is not diagonal");
  return r;
}

struct CliffordChecks {
  double anticommutator = 0.0;
  double gamma_squared = 0.0;   // |Gamma^2 - id|
  double gamma_anticomm = 0.0;  // |Gamma g_m + g_m Gamma|
  double c_conj = 0.0;          // |C conj(C) -+ id|
  double b_intertwines = 0.0;
  double epsilon_antisym = 0.0;
};

inline CliffordChecks check_clifford(const CliffordRep& r) {
  CliffordChecks c;
  const CMat g = r.metric();
  const CMat Id = CMat::Identity(4, 4);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n)
      c.anticommutator = std::max(
          c.anticommutator,
          (r.gamma[m] * r.gamma[n] + r.gamma[n] * r.gamma[m] - 2.0 * g(m, n) * Id).cwiseAbs().maxCoeff());
    c.gamma_anticomm = std::max(c.gamma_anticomm,
                                (r.Gamma * r.gamma[m] + r.gamma[m] * r.Gamma).cwiseAbs().maxCoeff());
    c.b_intertwines = std::max(c.b_intertwines,
                               (r.B * r.gamma[m] - r.gamma[m].transpose() * r.B).cwiseAbs().maxCoeff());
  }
  c.gamma_squared = (r.Gamma * r.Gamma - Id).cwiseAbs().maxCoeff();
  const double sign = r.signature == Signature::Euclidean ? -1.0 : 1.0;
  c.c_conj = (r.C * r.C.conjugate() - sign * Id).cwiseAbs().maxCoeff();
  const CMat eps = r.epsilon();
  c.epsilon_antisym = (eps + eps.transpose()).cwiseAbs().maxCoeff();
  return c;
}

/// phi_c = C^{-1} conj(phi).
inline CVec charge_conjugate(const CVec& phi, const CliffordRep& r) {
  return r.C.inverse() * phi.conjugate();
}

/// +1 or -1 for a chiral spinor, 0 otherwise.
inline int chirality(const CVec& phi, const CliffordRep& r, double tol = 1e-10) {
  const double n = phi.norm();
  if (n == 0.0) return 0;
  if ((r.Gamma * phi - phi).norm() <= tol * n) return 1;
  if ((r.Gamma * phi + phi).norm() <= tol * n) return -1;
  return 0;
}

/// N(phi) = { w : gamma(w) phi = 0 }, as the columns of a 4 x 2 matrix.
inline CMat mtn_from_spinor(const CVec& phi, const CliffordRep& r) {
  if (phi.norm() == 0.0) throw PreconditionError("mtn_from_spinor: spinor is zero");
  if (chirality(phi, r) == 0) throw PreconditionError("mtn_from_spinor: spinor is not chiral");
  CMat M(4, 4);
  for (int m = 0; m < 4; ++m) M.col(m) = r.gamma[m] * phi;
  CMat ns = nullspace(M);
  if (ns.cols() != 2) throw SolverError("mtn_from_spinor: null space is not two-dimensional");
  return ns;
}

// ---------------------------------------------------------------------------
// Binary quartics.

/// psi_k = component with k indices equal to 2; the quartic is
/// P(z0, z1) = sum_k binom(4,k) psi_k z0^(4-k) z1^k, and p(z) = P(z, 1).
struct SymSpinor4 {
  std::array<cplx, 5> psi{};
  double max_abs() const {
    double m = 0.0;
    for (cplx c : psi) m = std::max(m, std::abs(c));
    return m;
  }
};

/// A point of CP1, stored as a unit vector; z = z0 / z1 (infinity when z1 = 0).
struct ProjRoot {
  cplx z0 = 1.0, z1 = 0.0;
  static ProjRoot affine(cplx z) { return normalized(z, 1.0); }
  static ProjRoot infinity() { return {1.0, 0.0}; }
  static ProjRoot normalized(cplx a, cplx b) {
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
  }
  bool at_infinity(double tol = 1e-12) const { return std::abs(z1) <= tol; }
};

inline double chordal(const ProjRoot& a, const ProjRoot& b) {
  const double na = std::sqrt(std::norm(a.z0) + std::norm(a.z1));
  const double nb = std::sqrt(std::norm(b.z0) + std::norm(b.z1));
  return std::abs(a.z0 * b.z1 - a.z1 * b.z0) / (na * nb);
}

inline constexpr double kBinom4[5] = {1, 4, 6, 4, 1};

/// Quartic vanishing exactly at the given four points.
inline SymSpinor4 quartic_from_roots(const std::vector<ProjRoot>& roots, cplx scale = 1.0) {
  if (roots.size() != 4) throw PreconditionError("quartic_from_roots: need four roots");
  // coefficients of z0^(4-k) z1^k in prod (b_i z0 - a_i z1)
  std::vector<cplx> c{scale};
  for (const auto& r : roots) {
    std::vector<cplx> n(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      n[k] += c[k] * r.z1;
      n[k + 1] -= c[k] * r.z0;
    }
    c = n;
  }
  SymSpinor4 s;
  for (int k = 0; k < 5; ++k) s.psi[k] = c[k] / kBinom4[k];
  return s;
}

inline cplx eval_quartic(const SymSpinor4& s, const ProjRoot& r) {
  cplx v = 0.0;
  for (int k = 0; k < 5; ++k)
    v += kBinom4[k] * s.psi[k] * std::pow(r.z0, 4 - k) * std::pow(r.z1, k);
  return v;
}

enum class PetrovType { I, II, III, D, N, O };

inline const char* type_name(PetrovType t) {
  switch (t) {
    case PetrovType::I: return "I";
    case PetrovType::II: return "II";
    case PetrovType::III: return "III";
    case PetrovType::D: return "D";
    case PetrovType::N: return "N";
    case PetrovType::O: return "0";
  }
  return "?";
}

inline std::optional<PetrovType> type_from_name(const std::string& s) {
  for (auto t : {PetrovType::I, PetrovType::II, PetrovType::III, PetrovType::D, PetrovType::N, PetrovType::O})
    if (s == type_name(t)) return t;
  if (s == "O") return PetrovType::O;
  return std::nullopt;
}

struct PetrovReport {
  PetrovType type = PetrovType::O;
  std::vector<ProjRoot> roots;    // distinct roots
  std::vector<int> multiplicity;  // same order as roots
  double backward_error = 0.0;    // relative coefficient error of the accepted factorization
  double rejected_backward = 0.0; // best error among the more degenerate shapes that were rejected
  double separation = 0.0;        // smallest chordal distance between distinct roots
  std::vector<int> partition() const {
    std::vector<int> p = multiplicity;
    std::sort(p.begin(), p.end());
    return p;
  }
};

namespace algclass_detail {

using Poly = std::vector<cplx>;  // highest degree first

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly linear_power(cplx root, int m) {
  Poly r{1.0};
  for (int k = 0; k < m; ++k) r = poly_mul(r, Poly{1.0, -root});
  return r;
}

struct Fit {
  std::vector<cplx> roots;
  std::vector<int> mult;
  cplx lead;
  double backward = INFINITY;
};

/// Gauss-Newton for q(t) = lead * prod (t - rho_j)^m_j.
inline Fit fit_shape(const Poly& q, const std::vector<int>& mult, std::vector<cplx> rho) {
  const int k = static_cast<int>(mult.size());
  cplx lead = q[0];
  double qn = 0.0;
  for (cplx c : q) qn += std::norm(c);
  qn = std::sqrt(qn);
  auto model = [&](const std::vector<cplx>& r, cplx a) {
    Poly p{a};
    for (int j = 0; j < k; ++j) p = poly_mul(p, linear_power(r[j], mult[j]));
    return p;
  };
  auto backward = [&](const std::vector<cplx>& r, cplx a) {
    Poly p = model(r, a);
    double e = 0.0;
    for (int i = 0; i < 5; ++i) e += std::norm(p[i] - q[i]);
    return std::sqrt(e) / qn;
  };
  Fit best{rho, mult, lead, backward(rho, lead)};
  for (int it = 0; it < 60 && best.backward > 1e-17; ++it) {
    Poly p = model(rho, lead);
    CVec res(5);
    for (int i = 0; i < 5; ++i) res(i) = p[i] - q[i];
    CMat J(5, k + 1);
    Poly base{1.0};
    for (int j = 0; j < k; ++j) base = poly_mul(base, linear_power(rho[j], mult[j]));
    for (int i = 0; i < 5; ++i) J(i, 0) = base[i];
    for (int j = 0; j < k; ++j) {
      Poly dj{-double(mult[j]) * lead};
      for (int l = 0; l < k; ++l) dj = poly_mul(dj, linear_power(rho[l], l == j ? mult[l] - 1 : mult[l]));
      // degree 3, aligned with the low-order coefficients
      J(0, j + 1) = 0.0;
      for (int i = 1; i < 5; ++i) J(i, j + 1) = dj[i - 1];
    }
    Eigen::CompleteOrthogonalDecomposition<CMat> cod(J.rows(), J.cols());
    cod.setThreshold(1e-300);
    cod.compute(J);
    CVec step = cod.solve(-res);
    if (!step.allFinite()) break;
    // the Jacobian is badly conditioned near clustered roots; backtrack
    bool improved = false;
    for (int h = 0; h < 40 && !improved; ++h, step *= 0.5) {
      std::vector<cplx> r2 = rho;
      for (int j = 0; j < k; ++j) r2[j] += step(j + 1);
      const cplx a2 = lead + step(0);
      const double e = backward(r2, a2);
      if (e < best.backward) {
        rho = r2;
        lead = a2;
        best = Fit{rho, mult, lead, e};
        improved = true;
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace algclass_detail

/// Backward error accepted for a degenerate factorization, as a multiple of tol^2.
inline constexpr double kBackwardFactor = 1e-2;

/// Root multiplicities of the quartic. Candidate factorization shapes are
/// tried from most to least degenerate; a shape is accepted when a
/// Gauss-Newton refit of lead * prod (t - rho_j)^m_j reproduces the
/// coefficients to a relative backward error of kBackwardFactor * tol^2 and
/// its distinct roots are more than tol apart in the chordal metric. The
/// form is first rotated in SU(2) so that no root lies near infinity.
inline PetrovReport classify_quartic(const SymSpinor4& psi_in, double tol = 1e-6, double backward_tol = 0.0) {
  using namespace algclass_detail;
  if (!(tol > 0)) throw PreconditionError("classify_quartic: tol must be positive");
  PetrovReport rep;
  const double s = psi_in.max_abs();
  if (s < tol) return rep;
  SymSpinor4 psi = psi_in;
  for (auto& c : psi.psi) c /= s;

  // direction maximizing |P| on the unit sphere of C^2
  ProjRoot d{1.0, 0.0};
  double best = std::abs(eval_quartic(psi, d));
  const int nt = 24, np = 24;
  for (int a = 0; a <= nt; ++a)
    for (int b = 0; b < np; ++b) {
      const double th = M_PI / 2 * a / nt, ph = 2 * M_PI * b / np;
      ProjRoot c{std::cos(th), std::sin(th) * std::polar(1.0, ph)};
      const double v = std::abs(eval_quartic(psi, c));
      if (v > best) {
        best = v;
        d = c;
      }
    }
  // Q(t) = P(d0 t - conj(d1), d1 t + conj(d0))
  Poly q{0, 0, 0, 0, 0};
  for (int k = 0; k < 5; ++k) {
    Poly term{kBinom4[k] * psi.psi[k]};
    for (int e = 0; e < 4 - k; ++e) term = poly_mul(term, Poly{d.z0, -std::conj(d.z1)});
    for (int e = 0; e < k; ++e) term = poly_mul(term, Poly{d.z1, std::conj(d.z0)});
    for (int i = 0; i < 5; ++i) q[i] += term[i];
  }
  auto unrotate = [&](cplx t) { return ProjRoot::normalized(d.z0 * t - std::conj(d.z1), d.z1 * t + std::conj(d.z0)); };

  Eigen::Matrix4cd comp = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) comp(0, i) = -q[i + 1] / q[0];
  for (int i = 1; i < 4; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(comp);
  std::array<cplx, 4> ev;
  for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()(i);

  // shapes grouped by the number of distinct roots; within a group the best fit wins
  const std::vector<std::vector<std::vector<int>>> levels = {{{4}}, {{1, 3}, {2, 2}}, {{1, 1, 2}}};
  const double accept = backward_tol > 0 ? backward_tol : kBackwardFactor * tol * tol;
  rep.rejected_backward = INFINITY;
  for (const auto& level : levels) {
    Fit chosen;
    for (const auto& shape : level) {
      std::set<std::vector<int>> seen;
      std::array<int, 4> perm{0, 1, 2, 3};
      do {
        // canonical key: group members sorted, groups tagged by multiplicity
        std::vector<int> key;
        int pos = 0;
        std::vector<std::vector<int>> groups;
        for (int m : shape) {
          std::vector<int> grp(perm.begin() + pos, perm.begin() + pos + m);
          std::sort(grp.begin(), grp.end());
          grp.insert(grp.begin(), m);
          groups.push_back(grp);
          pos += m;
        }
        std::sort(groups.begin(), groups.end());
        for (auto& grp : groups) key.insert(key.end(), grp.begin(), grp.end());
        if (!seen.insert(key).second) continue;

        std::vector<cplx> init;
        pos = 0;
        for (int m : shape) {
          cplx mean = 0.0;
          for (int t = 0; t < m; ++t) mean += ev[perm[pos + t]];
          init.push_back(mean / double(m));
          pos += m;
        }
        Fit f = fit_shape(q, shape, init);
        // distinct roots must be separated
        double sep = INFINITY;
        for (std::size_t i = 0; i < f.roots.size(); ++i)
          for (std::size_t j = i + 1; j < f.roots.size(); ++j)
            sep = std::min(sep, chordal(unrotate(f.roots[i]), unrotate(f.roots[j])));
        if (sep <= tol) continue;
        if (f.backward < chosen.backward) chosen = f;
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    if (chosen.backward <= accept) {
      rep.backward_error = chosen.backward;
      for (std::size_t j = 0; j < chosen.roots.size(); ++j) {
        rep.roots.push_back(unrotate(chosen.roots[j]));
        rep.multiplicity.push_back(chosen.mult[j]);
      }
      break;
    }
    rep.rejected_backward = std::min(rep.rejected_backward, chosen.backward);
  }
  if (rep.roots.empty()) {
    for (int i = 0; i < 4; ++i) {
      rep.roots.push_back(unrotate(ev[i]));
      rep.multiplicity.push_back(1);
    }
    Poly fit{q[0]};
    for (int i = 0; i < 4; ++i) fit = poly_mul(fit, Poly{1.0, -ev[i]});
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 5; ++i) {
      num += std::norm(fit[i] - q[i]);
      den += std::norm(q[i]);
    }
    rep.backward_error = std::sqrt(num / den);
  }
  rep.separation = INFINITY;
  for (std::size_t a = 0; a < rep.roots.size(); ++a)
    for (std::size_t b = a + 1; b < rep.roots.size(); ++b)
      rep.separation = std::min(rep.separation, chordal(rep.roots[a], rep.roots[b]));
  const auto p = rep.partition();
  if (p == std::vector<int>{4}) rep.type = PetrovType::N;
  else if (p == std::vector<int>{1, 3}) rep.type = PetrovType::III;
  else if (p == std::vector<int>{2, 2}) rep.type = PetrovType::D;
  else if (p == std::vector<int>{1, 1, 2}) rep.type = PetrovType::II;
  else rep.type = PetrovType::I;
  return rep;
}

/// Spinor of S+ with CP1 coordinates (z0, z1) in the basis rep.splus.
inline CVec spinor_of(const ProjRoot& r, const CliffordRep& rep) {
  return rep.splus.col(0) * r.z0 + rep.splus.col(1) * r.z1;
}

inline ProjRoot root_of(const CVec& phi, const CliffordRep& rep) {
  const CVec c = rep.splus.adjoint() * phi;
  return ProjRoot::normalized(c(0), c(1));
}

/// Charge conjugation acting on CP1 = P(S+) in the Euclidean case.
inline ProjRoot conjugate_root(const ProjRoot& r, const CliffordRep& rep) {
  return root_of(charge_conjugate(spinor_of(r, rep), rep), rep);
}

/// Proper Riemannian classification: the roots come in conjugate pairs
/// (r, r_c); D when the two pairs coincide, I when they are distinct.
inline PetrovType classify_riemannian(const SymSpinor4& psi, const CliffordRep& rep, double tol = 1e-6) {
  if (rep.signature != Signature::Euclidean)
    throw PreconditionError("classify_riemannian: needs the Euclidean representation");
  const PetrovReport r = classify_quartic(psi, tol);
  if (r.type == PetrovType::O) return PetrovType::O;
  const double pair_tol = std::max(1e3 * tol, 1e-8);
  for (std::size_t a = 0; a < r.roots.size(); ++a) {
    const ProjRoot c = conjugate_root(r.roots[a], rep);
    bool found = false;
    for (std::size_t b = 0; b < r.roots.size(); ++b)
      if (chordal(c, r.roots[b]) <= pair_tol && r.multiplicity[a] == r.multiplicity[b]) found = true;
    if (!found) {
      std::ostringstream os;
      os << "classify_riemannian: root (" << r.roots[a].z0 << ", " << r.roots[a].z1
         << ") with multiplicity " << r.multiplicity[a] << " has no charge-conjugate partner";
      throw PreconditionError(os.str());
    }
  }
  const auto p = r.partition();
  if (p == std::vector<int>{2, 2}) return PetrovType::D;
  if (p == std::vector<int>{1, 1, 1, 1}) return PetrovType::I;
  throw PreconditionError("classify_riemannian: multiplicity pattern incompatible with the reality condition");
}

// ---------------------------------------------------------------------------
// Weyl scalars.

inline cplx contract4(const Tensor& C, const CVec& a, const CVec& b, const CVec& c, const CVec& d) {
  cplx s = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (a(i) == cplx{}) continue;
    for (int j = 0; j < 4; ++j) {
      if (b(j) == cplx{}) continue;
      const cplx ab = a(i) * b(j);
      for (int k = 0; k < 4; ++k) {
        if (c(k) == cplx{}) continue;
        for (int l = 0; l < 4; ++l) s += ab * c(k) * d(l) * C(i, j, k, l);
      }
    }
  }
  return s;
}

/// Psi_0..Psi_4 of the lowered Weyl tensor in the tetrad (l, n, m):
///   Psi0 = C(l,m,l,m)      Psi1 = -C(l,n,l,m)   Psi2 = -C(l,m,mbar,n)
///   Psi3 = C(l,n,mbar,n)   Psi4 = C(n,mbar,n,mbar)
inline SymSpinor4 weyl_scalars(const Tensor& weyl, const NullTetrad& t) {
  const CVec mb = t.m.conjugate();
  SymSpinor4 s;
  s.psi[0] = contract4(weyl, t.l, t.m, t.l, t.m);
  s.psi[1] = -contract4(weyl, t.l, t.n, t.l, t.m);
  s.psi[2] = -contract4(weyl, t.l, t.m, mb, t.n);
  s.psi[3] = contract4(weyl, t.l, t.n, mb, t.n);
  s.psi[4] = contract4(weyl, t.n, mb, t.n, mb);
  return s;
}

struct MetricPetrov {
  PetrovReport report;
  SymSpinor4 psi;
  double weyl_scale = 0.0;  // max|Psi| / (1 + max|dGamma| + max|Gamma|^2)
};

inline MetricPetrov petrov_of_metric(const MetricField& g, std::span<const double> p, double tol = 1e-6,
                                     std::uint64_t tetrad_seed = 0) {
  const CurvatureAtPoint c = curvature_at(g, p);
  if (c.dim() != 4 || !c.metric.lorentzian())
    throw PreconditionError("petrov_of_metric: needs a Lorentzian metric in dimension 4");
  const NullTetrad t = build_null_tetrad(c.metric, tetrad_seed);
  MetricPetrov out;
  out.psi = weyl_scalars(c.weyl, t);
  out.weyl_scale = out.psi.max_abs() / c.scale;
  if (out.weyl_scale < tol) return out;
  out.report = classify_quartic(out.psi, tol);
  return out;
}

}  // namespace robinson
