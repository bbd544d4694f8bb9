#pragma once

// Line-oriented model files. One declaration per line, '#' starts a comment.
//
//   model <name>
//   title <text>
//   chart <name> <coord> <coord> ...
//   pair <w> <x> <y>                      w = x + i y
//   param <name> = <constant expression>
//   let <name> = <expression>
//   box <coord> <lo> <hi>
//   signature lorentzian | euclidean
//   form <name>: <basis> = <expr>; <basis> = <expr>; ...
//        basis: d<coord>, d<pair>, d<pair>bar, or a wedge such as du^dw
//   metric: <a> <b> = <expr>; ...         sum of expr * (a b), a b symmetrized;
//                                         a, b are named 1-forms or 1-form bases
//   vector <name> = (<expr>, <expr>, ...)
//   nstructure <name> = <kappa>, <mu1>, ...
//   cr <name> = <kappa>, <mu1>, ...
//   maxwell <name> = <F>, <kappa>, <orientation>
//   kerr <name> = <H in z1, z2, z3>; seed = <constant expression>
//   zfield <name> = <expression for z>
//   expect <check> [<subject>] <value> [TAG] or [TAG: text]
//
// TAG is one of PAPER, DERIVED, TRIVIAL.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "robinson/cr.hpp"
#include "robinson/fields.hpp"
#include "robinson/kerrtwistor.hpp"
#include "robinson/optics.hpp"

namespace robinson {

struct Expectation {
  std::string check;
  std::string subject;
  std::string value;
  std::string provenance;
  int line = 0;
};

struct MaxwellDecl {
  FormField F, kappa;
  int orientation = 1;
};

struct KerrDecl {
  KerrFunction H;
  cplx seed;
};

struct Model {
  std::string name, title, path;
  ChartPtr chart;
  std::map<std::string, cplx> params;
  std::map<std::string, Expression> lets;
  DomainBox box;
  Signature signature = Signature::Lorentzian;
  std::optional<MetricField> metric;
  std::map<std::string, FormField> forms;
  std::map<std::string, VectorField> vectors;
  std::map<std::string, NStructureSpec> nstructures;
  std::map<std::string, CRChart> crs;
  std::map<std::string, MaxwellDecl> maxwell;
  std::map<std::string, KerrDecl> kerr;
  std::map<std::string, ScalarField> zfields;
  std::vector<Expression> expressions;  // every parsed expression
  std::vector<Expectation> expectations;

  std::vector<Point> samples(int count, std::uint64_t seed) const { return box.sample(count, seed); }
};

/// Replacement text for `let` and `param` declarations, and for box bounds.
struct ModelOverrides {
  std::map<std::string, std::string> lets;
  std::map<std::string, std::pair<double, double>> boxes;
};

namespace model_detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Splits at `sep` outside parentheses.
inline std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> w;
  std::string t;
  while (in >> t) w.push_back(t);
  return w;
}

/// "name = rest" -> {name, rest}
inline std::pair<std::string, std::string> split_eq(const std::string& s, int line) {
  const auto pos = s.find('=');
  if (pos == std::string::npos) throw ModelError("expected '='", line);
  return {trim(s.substr(0, pos)), trim(s.substr(pos + 1))};
}

class Loader {
 public:
  Loader(const ModelOverrides& ov) : ov_(ov) {}

  Model run(const std::string& text, const std::string& path) {
    m_.path = path;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      const auto hash = raw.find('#');
      std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      const auto sp = s.find_first_of(" \t:");
      const std::string kw = s.substr(0, sp);
      const std::string rest = sp == std::string::npos ? "" : trim(s.substr(sp));
      statement(kw, rest);
    }
    finish();
    return std::move(m_);
  }

 private:
  void fail(const std::string& what) const { throw ModelError(what, line_); }

  void need_chart() const {
    if (!m_.chart) fail("chart must be declared first");
  }

  Expression expr(const std::string& text) {
    need_chart();
    try {
      Expression e = parse(text, m_.chart, m_.params, &m_.lets);
      m_.expressions.push_back(e);
      return e;
    } catch (const ParseError& e) {
      fail(std::string("expression '") + text + "': " + e.what());
    }
    throw ModelError("unreachable", line_);
  }

  cplx constant(const std::string& text) {
    std::optional<Expression> parsed;
    try {
      parsed = parse(text, m_.chart, m_.params, &m_.lets);
    } catch (const ParseError& e) {
      fail(std::string("expression '") + text + "': " + e.what());
    }
    const Expression& e = *parsed;
    const Point zero(m_.chart->dim(), 0.0);
    const Jet2 j = e.jet(zero);
    for (int i = 0; i < j.dim; ++i)
      if (j.grad[i] != cplx{}) fail("'" + text + "' is not constant");
    return j.value;
  }

  /// A 1-form basis element or a named 1-form.
  FormField one_form(const std::string& name) {
    if (auto it = m_.forms.find(name); it != m_.forms.end()) {
      if (it->second.degree() != 1) fail("'" + name + "' is not a 1-form");
      return it->second;
    }
    if (auto b = basis(name)) return *b;
    fail("unknown 1-form '" + name + "'");
    return {};
  }

  std::optional<FormField> basis(const std::string& name) {
    if (name.size() < 2 || name[0] != 'd') return std::nullopt;
    const std::string body = name.substr(1);
    if (auto i = m_.chart->index_of(body)) return coordinate_differential(m_.chart, *i);
    if (m_.chart->pair(body)) return complex_differential(m_.chart, body);
    if (body.size() > 3 && body.substr(body.size() - 3) == "bar") {
      const std::string w = body.substr(0, body.size() - 3);
      if (m_.chart->pair(w)) return complex_differential(m_.chart, w, true);
    }
    return std::nullopt;
  }

  FormField basis_wedge(const std::string& key) {
    const auto parts = split_top(key, '^');
    std::optional<FormField> acc;
    for (const auto& p : parts) {
      auto b = basis(p);
      if (!b) fail("unknown basis element '" + p + "'");
      acc = acc ? wedge(*acc, *b) : *b;
    }
    return *acc;
  }

  FormField form(const std::string& rest) {
    std::optional<FormField> acc;
    for (const auto& term : split_top(rest, ';')) {
      if (term.empty()) continue;
      auto [key, val] = split_eq(term, line_);
      FormField b = basis_wedge(key);
      const ScalarField coef = ScalarField(expr(val));
      const FormField t = coef * b;
      if (acc && acc->degree() != t.degree()) fail("mixed degrees in form");
      acc = acc ? *acc + t : t;
    }
    if (!acc) fail("empty form");
    return *acc;
  }

  std::vector<std::string> names(const std::string& rest) {
    std::vector<std::string> out;
    for (auto& s : split_top(rest, ',')) {
      if (s.empty()) fail("empty name in list");
      out.push_back(s);
    }
    return out;
  }

  FormField named_form(const std::string& n) {
    auto it = m_.forms.find(n);
    if (it != m_.forms.end()) return it->second;
    if (auto b = basis(n)) return *b;
    fail("unknown form '" + n + "'");
    return {};
  }

  void statement(const std::string& kw, const std::string& rest) {
    if (kw == "model") {
      m_.name = rest;
    } else if (kw == "title") {
      m_.title = rest;
    } else if (kw == "chart") {
      if (m_.chart) fail("chart declared twice");
      auto w = words(rest);
      if (w.size() < 2) fail("chart needs a name and coordinates");
      chart_name_ = w[0];
      coords_.assign(w.begin() + 1, w.end());
      m_.chart = Chart::make(chart_name_, coords_);
      m_.box.bounds.assign(coords_.size(), {-1.0, 1.0});
    } else if (kw == "pair") {
      need_chart();
      auto w = words(rest);
      if (w.size() != 3) fail("pair needs <name> <x> <y>");
      pairs_.emplace_back(w[0], w[1], w[2]);
      for (int k = 1; k < 3; ++k)
        if (!m_.chart->index_of(w[k])) fail("pair refers to unknown coordinate " + w[k]);
      m_.chart = Chart::make(chart_name_, coords_, pairs_);
    } else if (kw == "param") {
      need_chart();
      auto [n, v] = split_eq(rest, line_);
      if (auto o = ov_.lets.find(n); o != ov_.lets.end()) {
        v = o->second;
        used_.insert(n);
      }
      m_.params[n] = constant(v);
    } else if (kw == "let") {
      need_chart();
      auto [n, v] = split_eq(rest, line_);
      if (auto o = ov_.lets.find(n); o != ov_.lets.end()) {
        v = o->second;
        used_.insert(n);
      }
      m_.lets.insert_or_assign(n, expr(v));
    } else if (kw == "box") {
      need_chart();
      auto w = words(rest);
      if (w.size() != 3) fail("box needs <coord> <lo> <hi>");
      auto i = m_.chart->index_of(w[0]);
      if (!i) fail("box refers to unknown coordinate " + w[0]);
      const double lo = constant(w[1]).real(), hi = constant(w[2]).real();
      if (!(lo <= hi)) fail("box bounds out of order");
      m_.box.bounds[*i] = {lo, hi};
    } else if (kw == "signature") {
      if (rest == "lorentzian") {
        m_.signature = Signature::Lorentzian;
      } else if (rest == "euclidean") {
        m_.signature = Signature::Euclidean;
      } else {
        fail("signature must be lorentzian or euclidean");
      }
    } else if (kw == "form") {
      need_chart();
      const auto colon = rest.find(':');
      if (colon == std::string::npos) fail("form needs '<name>: ...'");
      const std::string n = trim(rest.substr(0, colon));
      m_.forms.insert_or_assign(n, form(rest.substr(colon + 1)));
    } else if (kw == "metric") {
      need_chart();
      std::string body = rest;
      if (!body.empty() && body[0] == ':') body = body.substr(1);
      for (const auto& term : split_top(body, ';')) {
        if (term.empty()) continue;
        auto [lhs, val] = split_eq(term, line_);
        auto w = words(lhs);
        if (w.size() != 2) fail("metric term needs two 1-forms");
        metric_terms_.push_back({ScalarField(expr(val)), one_form(w[0]), one_form(w[1])});
      }
    } else if (kw == "vector") {
      need_chart();
      auto [n, v] = split_eq(rest, line_);
      if (v.size() < 2 || v.front() != '(' || v.back() != ')') fail("vector needs (c1, c2, ...)");
      auto parts = split_top(v.substr(1, v.size() - 2), ',');
      if (static_cast<int>(parts.size()) != m_.chart->dim()) fail("vector needs one component per coordinate");
      std::vector<ScalarField> c;
      for (const auto& p : parts) c.emplace_back(expr(p));
      m_.vectors.insert_or_assign(n, VectorField(m_.chart, c));
    } else if (kw == "nstructure" || kw == "cr") {
      need_chart();
      auto [n, v] = split_eq(rest, line_);
      auto list = names(v);
      if (list.size() < 2) fail(kw + " needs kappa and at least one mu");
      FormField kappa = named_form(list[0]);
      std::vector<FormField> mu;
      for (std::size_t i = 1; i < list.size(); ++i) mu.push_back(named_form(list[i]));
      if (kw == "cr") {
        try {
          m_.crs.insert_or_assign(n, make_cr_chart(kappa, mu, n));
        } catch (const PreconditionError& e) {
          fail(e.what());
        }
      } else {
        m_.nstructures.insert_or_assign(n, NStructureSpec{kappa, mu});
      }
    } else if (kw == "maxwell") {
      need_chart();
      auto [n, v] = split_eq(rest, line_);
      auto list = names(v);
      if (list.size() != 3) fail("maxwell needs F, kappa, orientation");
      MaxwellDecl d{named_form(list[0]), named_form(list[1]), 1};
      if (list[2] == "1" || list[2] == "+1") {
        d.orientation = 1;
      } else if (list[2] == "-1") {
        d.orientation = -1;
      } else {
        fail("orientation must be 1 or -1");
      }
      if (d.F.degree() != 2) fail("maxwell field must be a 2-form");
      m_.maxwell.insert_or_assign(n, d);
    } else if (kw == "kerr") {
      need_chart();
      auto parts = split_top(rest, ';');
      auto [n, h] = split_eq(parts[0], line_);
      cplx seed = 0.0;
      for (std::size_t i = 1; i < parts.size(); ++i) {
        auto [k, v] = split_eq(parts[i], line_);
        if (k != "seed") fail("unknown kerr option " + k);
        seed = constant(v);
      }
      try {
        m_.kerr.insert_or_assign(n, KerrDecl{KerrFunction::parse(h, m_.params), seed});
      } catch (const ParseError& e) {
        fail(std::string("Kerr function: ") + e.what());
      }
      try {
        MinkIndex::of(*m_.chart);
      } catch (const PreconditionError& e) {
        fail(e.what());
      }
    } else if (kw == "zfield") {
      need_chart();
      auto [n, v] = split_eq(rest, line_);
      m_.zfields.insert_or_assign(n, ScalarField(expr(v)));
    } else if (kw == "expect") {
      expectation(rest);
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }

  void expectation(const std::string& rest) {
    const auto lb = rest.find('[');
    if (lb == std::string::npos || rest.empty() || rest.back() != ']') fail("expectation needs a provenance tag [PAPER|DERIVED|TRIVIAL ...]");
    const std::string tag = rest.substr(lb + 1, rest.size() - lb - 2);
    const std::string kind = trim(tag.substr(0, tag.find(':')));
    if (kind != "PAPER" && kind != "DERIVED" && kind != "TRIVIAL") fail("unknown provenance tag '" + kind + "'");
    auto w = words(rest.substr(0, lb));
    Expectation e;
    e.provenance = tag;
    e.line = line_;
    if (w.size() == 2) {
      e.check = w[0];
      e.value = w[1];
    } else if (w.size() == 3) {
      e.check = w[0];
      e.subject = w[1];
      e.value = w[2];
    } else {
      fail("expectation needs <check> [<subject>] <value>");
    }
    m_.expectations.push_back(e);
  }

  void finish() {
    if (!m_.chart) throw ModelError("no chart declared", 0);
    if (m_.name.empty()) throw ModelError("no model name", 0);
    for (const auto& [n, v] : ov_.lets)
      if (!used_.count(n)) throw ModelError("override '" + n + "' matches no let or param", 0);
    for (const auto& [c, b] : ov_.boxes) {
      auto i = m_.chart->index_of(c);
      if (!i) throw ModelError("box override for unknown coordinate " + c, 0);
      m_.box.bounds[*i] = b;
    }
    if (!metric_terms_.empty()) m_.metric = metric_from_terms(m_.chart, metric_terms_, m_.signature);
  }

  const ModelOverrides& ov_;
  Model m_;
  int line_ = 0;
  std::string chart_name_;
  std::vector<std::string> coords_;
  std::vector<std::tuple<std::string, std::string, std::string>> pairs_;
  std::vector<MetricTerm> metric_terms_;
  std::set<std::string> used_;
};

}  // namespace model_detail

inline Model parse_model(const std::string& text, const std::string& path = "<text>",
                         const ModelOverrides& ov = {}) {
  return model_detail::Loader(ov).run(text, path);
}

inline Model load_model(const std::filesystem::path& path, const ModelOverrides& ov = {}) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str(), path.string(), ov);
  } catch (const ModelError& e) {
    throw ModelError(e.detail(), e.line(), path.filename().string());
  }
}

}  // namespace robinson
