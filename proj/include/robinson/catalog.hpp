#pragma once

// Runs the expectations declared in a model file and collects one record per
// check. Reports are deterministic for fixed (points, seed, tol); wall time
// is only recorded when asked for.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "robinson/algclass.hpp"
#include "robinson/curvature.hpp"
#include "robinson/kerrtwistor.hpp"
#include "robinson/model.hpp"
#include "robinson/optics.hpp"

namespace robinson {

struct CheckConfig {
  int points = 100;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  bool timing = false;
  std::vector<std::string> only;  // restrict to these check names when non-empty
};

struct CheckRecord {
  std::string model;
  std::string check;
  std::string subject;
  std::string expected;
  std::string observed;
  double residual = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string provenance;
  std::string note;
  double seconds = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<CheckRecord> records;
  bool pass() const {
    return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
  }
};

/// Worst disagreement between the jets of `e` and central differences of its
/// values (gradient) and of its analytic gradient (Hessian), step h.
inline double jet_consistency(const Expression& e, std::span<const double> p, double h = 1e-5) {
  const int n = static_cast<int>(p.size());
  const Jet2 j = e.jet(p);
  double scale = 1.0 + std::abs(j.value);
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(j.grad[i]));
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    Point q(p.begin(), p.end());
    q[i] = p[i] + h;
    const Jet2 jp = e.jet(q);
    q[i] = p[i] - h;
    const Jet2 jm = e.jet(q);
    err = std::max(err, std::abs((jp.value - jm.value) / (2 * h) - j.grad[i]) / scale);
    double hs = 1.0;
    for (int k = 0; k < n; ++k) hs = std::max(hs, std::abs(j.dd(i, k)));
    for (int k = 0; k < n; ++k) err = std::max(err, std::abs((jp.grad[k] - jm.grad[k]) / (2 * h) - j.dd(i, k)) / hs);
  }
  return err;
}

inline constexpr double kJetTolerance = 1e-5;
inline constexpr double kPetrovTolerance = 1e-6;
inline constexpr double kKerrTolerance = 1e-12;

namespace catalog_detail {

inline std::string yes(bool b) { return b ? "true" : "false"; }

struct Outcome {
  std::string observed;
  double residual = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  std::string note;
};

class Runner {
 public:
  Runner(const Model& m, const CheckConfig& cfg) : m_(m), cfg_(cfg), pts_(m.samples(cfg.points, cfg.seed)) {}

  Outcome run(const Expectation& e) {
    const std::string& c = e.check;
    if (c == "flat" || c == "ricci_flat") return curvature(c == "flat");
    if (c == "petrov") return petrov();
    if (c == "null" || c == "geodesic" || c == "sng" || c == "twist" || c == "expansion") return congruence(c, e.subject);
    if (c == "integrable") return integrable(e.subject);
    if (c == "levi") return levi(e.subject);
    if (c == "maxwell") return maxwell(e.subject);
    if (c == "kerr_solved") return kerr_solved(e.subject);
    if (c == "jets") return jets();
    throw PreconditionError("unknown check '" + c + "'");
  }

 private:
  const MetricField& metric() const {
    if (!m_.metric) throw PreconditionError("model '" + m_.name + "' declares no metric");
    return *m_.metric;
  }

  Outcome curvature(bool full) {
    const SampleReport r = full ? is_flat(metric(), pts_) : is_ricci_flat(metric(), pts_);
    return {yes(r.holds(cfg_.tol)), r.max_residual, cfg_.tol, r.samples, ""};
  }

  Outcome petrov() {
    std::vector<std::string> types;
    double worst = 0.0;
    for (const auto& p : pts_) {
      const MetricPetrov mp = petrov_of_metric(metric(), p, kPetrovTolerance);
      const std::string t = mp.weyl_scale < kPetrovTolerance ? "0" : type_name(mp.report.type);
      worst = std::max(worst, mp.report.backward_error);
      if (std::find(types.begin(), types.end(), t) == types.end()) types.push_back(t);
    }
    std::string obs = types.size() == 1 ? types[0] : "mixed(";
    if (types.size() != 1) {
      for (std::size_t i = 0; i < types.size(); ++i) obs += (i ? "," : "") + types[i];
      obs += ")";
    }
    return {obs, worst, kPetrovTolerance, static_cast<int>(pts_.size()), "residual: worst quartic backward error"};
  }

  /// A vector field, or k_z of a Kerr declaration or z field.
  VectorField vector(const std::string& name) {
    if (auto it = m_.vectors.find(name); it != m_.vectors.end()) return it->second;
    return kerr_forms_of(name).k;
  }

  KerrForms kerr_forms_of(const std::string& name) {
    if (auto it = m_.zfields.find(name); it != m_.zfields.end()) return kerr_forms(m_.chart, it->second);
    return kerr_field(name).forms;
  }

  const KerrField& kerr_field(const std::string& name) {
    if (auto it = fields_.find(name); it != fields_.end()) return it->second;
    auto d = m_.kerr.find(name);
    if (d == m_.kerr.end()) throw PreconditionError("no vector field, Kerr function or z field named '" + name + "'");
    return fields_.emplace(name, kerr_congruence(m_.chart, d->second.H, pts_, d->second.seed)).first->second;
  }

  Outcome congruence(const std::string& c, const std::string& name) {
    const VectorField k = vector(name);
    const int n = static_cast<int>(pts_.size());
    if (c == "null") {
      double worst = 0.0;
      for (const auto& p : pts_) worst = std::max(worst, null_residual(k, metric(), p));
      return {yes(worst < cfg_.tol), worst, cfg_.tol, n, ""};
    }
    if (c == "geodesic") {
      double worst = 0.0;
      for (const auto& p : pts_) worst = std::max(worst, geodesic_residual(k, metric(), p));
      return {yes(worst < cfg_.tol), worst, cfg_.tol, n, ""};
    }
    const CongruenceReport r = analyze_congruence(k, metric(), pts_, cfg_.tol);
    if (c == "sng") return {yes(r.sng()), std::max(r.max_geodesic, r.max_shear), cfg_.tol, n, ""};
    if (c == "twist") return {r.twist_verdict(), r.max_twist, cfg_.tol, n, "residual: largest twist"};
    return {r.expansion_verdict(), r.max_abs_expansion, cfg_.tol, n, "residual: largest |expansion|"};
  }

  Outcome integrable(const std::string& name) {
    double worst = 0.0;
    std::function<std::vector<double>(const Point&)> res;
    if (auto it = m_.nstructures.find(name); it != m_.nstructures.end()) {
      const NStructureSpec ns = it->second;
      res = [ns](const Point& p) { return nstructure_integrability(ns, p); };
    } else if (auto c = m_.crs.find(name); c != m_.crs.end()) {
      const CRChart cr = c->second;
      res = [cr](const Point& p) {
        require_frame(cr, p);
        return integrability_residuals(cr.kappa, cr.mu, p);
      };
    } else {
      const NStructureSpec ns = kerr_forms_of(name).nstructure();
      res = [ns](const Point& p) { return nstructure_integrability(ns, p); };
    }
    for (const auto& p : pts_)
      for (double r : res(p)) worst = std::max(worst, r);
    return {yes(worst < cfg_.tol), worst, cfg_.tol, static_cast<int>(pts_.size()), ""};
  }

  Outcome levi(const std::string& name) {
    auto it = m_.crs.find(name);
    if (it == m_.crs.end()) throw PreconditionError("no CR chart named '" + name + "'");
    const LeviReport r = classify(it->second, pts_, cfg_.tol);
    double defect = 0.0;
    for (const auto& e : r.entries) defect = std::max(defect, e.hermitian_defect);
    return {r.summary(), defect, cfg_.tol, static_cast<int>(pts_.size()), "residual: worst Hermitian defect of h"};
  }

  Outcome maxwell(const std::string& name) {
    auto it = m_.maxwell.find(name);
    if (it == m_.maxwell.end()) throw PreconditionError("no Maxwell field named '" + name + "'");
    double worst = 0.0;
    for (const auto& p : pts_) {
      const MaxwellResiduals r = verify_null_maxwell(it->second.F, it->second.kappa, metric(), it->second.orientation, p);
      worst = std::max({worst, r.self_dual, r.closed, r.null});
    }
    return {yes(worst < cfg_.tol), worst, cfg_.tol, static_cast<int>(pts_.size()), ""};
  }

  Outcome kerr_solved(const std::string& name) {
    try {
      kerr_field(name);
    } catch (const SolverError& e) {
      return {"false", 0.0, kKerrTolerance, static_cast<int>(pts_.size()), e.what()};
    }
    const KerrField& f = kerr_field(name);
    const bool ok = f.failures.empty() && f.max_residual < kKerrTolerance && f.min_derivative > 1e-10;
    std::string note = std::to_string(f.failures.size()) + " unsolved samples";
    if (!f.failures.empty()) note += "; first: " + f.failures.front().reason;
    return {yes(ok), f.max_residual, kKerrTolerance, static_cast<int>(f.points.size()), note};
  }

  Outcome jets() {
    const int n = std::min<int>(static_cast<int>(pts_.size()), 20);
    double worst = 0.0;
    for (const auto& e : m_.expressions)
      for (int s = 0; s < n; ++s) worst = std::max(worst, jet_consistency(e, pts_[s]));
    // Kerr functions live on (z1, z2, z3); probe them along k_z for a fixed z
    for (const auto& [name, d] : m_.kerr) {
      const MinkIndex mi = MinkIndex::of(*m_.chart);
      for (int s = 0; s < n; ++s) {
        const Point& p = pts_[s];
        const C3 a = kerr_arguments(mi.U(p), mi.V(p), mi.W(p), cplx(0.3, 0.2));
        worst = std::max(worst, jet_consistency(d.H.expression(), d.H.argument_point(a)));
      }
    }
    return {yes(worst < kJetTolerance), worst, kJetTolerance, n,
            std::to_string(m_.expressions.size() + m_.kerr.size()) + " expressions"};
  }

  const Model& m_;
  const CheckConfig& cfg_;
  std::vector<Point> pts_;
  std::map<std::string, KerrField> fields_;
};

}  // namespace catalog_detail

/// One record per expectation, in file order, plus the jet check.
inline Report run_checks(const Model& m, const CheckConfig& cfg) {
  if (cfg.points < 1) throw PreconditionError("points must be at least 1");
  if (!(cfg.tol > 0)) throw PreconditionError("tolerance must be positive");
  catalog_detail::Runner runner(m, cfg);
  std::vector<Expectation> list = m.expectations;
  const bool has_jets =
      std::any_of(list.begin(), list.end(), [](const Expectation& e) { return e.check == "jets"; });
  if (!has_jets) list.push_back({"jets", "", "true", "DERIVED: forward jets against central differences", 0});
  Report rep;
  for (const auto& e : list) {
    if (!cfg.only.empty() && std::find(cfg.only.begin(), cfg.only.end(), e.check) == cfg.only.end()) continue;
    CheckRecord r;
    r.model = m.name;
    r.check = e.check;
    r.subject = e.subject;
    r.expected = e.value;
    r.provenance = e.provenance;
    r.seed = cfg.seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const catalog_detail::Outcome o = runner.run(e);
      r.observed = o.observed;
      r.residual = o.residual;
      r.tolerance = o.tolerance;
      r.samples = o.samples;
      r.note = o.note;
      r.pass = o.observed == e.value;
    } catch (const std::exception& ex) {
      r.observed = "error";
      r.note = ex.what();
      r.pass = false;
    }
    if (cfg.timing) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.records.push_back(std::move(r));
  }
  return rep;
}

#ifdef ROBINSON_CATALOG_DIR
inline std::filesystem::path default_catalog_dir() { return ROBINSON_CATALOG_DIR; }
#else
inline std::filesystem::path default_catalog_dir() { return "catalog"; }
#endif

struct CatalogEntry {
  std::string name;
  std::filesystem::path path;
};

/// Every *.model file of a directory, sorted by name.
inline std::vector<CatalogEntry> catalog_entries(const std::filesystem::path& dir = default_catalog_dir()) {
  std::vector<CatalogEntry> out;
  if (!std::filesystem::is_directory(dir)) throw ModelError("catalog directory not found: " + dir.string(), 0);
  for (const auto& f : std::filesystem::directory_iterator(dir))
    if (f.path().extension() == ".model") out.push_back({f.path().stem().string(), f.path()});
  std::sort(out.begin(), out.end(), [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
  return out;
}

/// A catalog name or a path to a model file.
inline std::filesystem::path resolve_model(const std::string& name_or_path,
                                           const std::filesystem::path& dir = default_catalog_dir()) {
  const std::filesystem::path given(name_or_path);
  if (given.has_parent_path() || given.extension() == ".model") {
    if (!std::filesystem::is_regular_file(given)) throw ModelError("no model file " + name_or_path, 0);
    return given;
  }
  const auto p = dir / (name_or_path + ".model");
  if (std::filesystem::exists(p)) return p;
  throw ModelError("no model named '" + name_or_path + "'", 0);
}

}  // namespace robinson
