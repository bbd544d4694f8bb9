#pragma once

// Coordinate expressions: parsing, printing, evaluation to second-order jets
// and Wirtinger derivatives.
//
// Grammar (whitespace insignificant):
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := base ('^' int)?          int := ['-'] digits | '(' '-' digits ')'
//   base  := number | 'i' | identifier | function '(' expr ')' | '(' expr ')'
// Functions: exp log sqrt sin cos conj re im.

#include <cctype>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robinson/errors.hpp"
#include "robinson/jet.hpp"

namespace robinson {

/// Declares w = x + i*y as a derived complex coordinate.
struct ComplexPair {
  int x = -1;
  int y = -1;
  std::string name;
};

class Chart {
 public:
  Chart(std::string name, std::vector<std::string> coord_names,
        std::vector<ComplexPair> pairs = {})
      : name_(std::move(name)),
        coords_(std::move(coord_names)),
        pairs_(std::move(pairs)) {
    const int n = dim();
    if (n < 1 || n > kMaxDim)
      throw PreconditionError("chart '" + name_ + "': dimension " +
                              std::to_string(n) + " outside 1.." +
                              std::to_string(kMaxDim));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (coords_[a] == coords_[b])
          throw PreconditionError("chart '" + name_ +
                                  "': duplicate coordinate " + coords_[a]);
    for (const auto& p : pairs_) {
      if (p.x < 0 || p.y < 0 || p.x >= n || p.y >= n || p.x == p.y)
        throw PreconditionError("chart '" + name_ + "': complex pair " +
                                p.name + " needs two distinct coordinates");
      if (index_of(p.name))
        throw PreconditionError("chart '" + name_ + "': complex name " +
                                p.name + " clashes with a coordinate");
    }
  }

  /// Convenience: pairs given as (complex name, x name, y name).
  static std::shared_ptr<const Chart> make(
      std::string name, std::vector<std::string> coords,
      const std::vector<std::tuple<std::string, std::string, std::string>>& pairs = {}) {
    std::vector<ComplexPair> cp;
    for (const auto& [w, x, y] : pairs) {
      ComplexPair p;
      p.name = w;
      for (int i = 0; i < static_cast<int>(coords.size()); ++i) {
        if (coords[i] == x) p.x = i;
        if (coords[i] == y) p.y = i;
      }
      cp.push_back(p);
    }
    return std::make_shared<const Chart>(std::move(name), std::move(coords),
                                         std::move(cp));
  }

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coord_names() const { return coords_; }
  const std::vector<ComplexPair>& complex_pairs() const { return pairs_; }

  std::optional<int> index_of(std::string_view coord) const {
    for (int i = 0; i < dim(); ++i)
      if (coords_[i] == coord) return i;
    return std::nullopt;
  }

  const ComplexPair* pair(std::string_view complex_name) const {
    for (const auto& p : pairs_)
      if (p.name == complex_name) return &p;
    return nullptr;
  }

 private:
  std::string name_;
  std::vector<std::string> coords_;
  std::vector<ComplexPair> pairs_;
};

using ChartPtr = std::shared_ptr<const Chart>;

enum class Fn { Exp, Log, Sqrt, Sin, Cos, Conj, Re, Im };

inline const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sqrt: return "sqrt";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Conj: return "conj";
    case Fn::Re: return "re";
    case Fn::Im: return "im";
  }
  return "?";
}

inline std::optional<Fn> fn_from_name(std::string_view s) {
  for (Fn f : {Fn::Exp, Fn::Log, Fn::Sqrt, Fn::Sin, Fn::Cos, Fn::Conj, Fn::Re, Fn::Im})
    if (s == fn_name(f)) return f;
  return std::nullopt;
}

enum class Op { Number, ImagUnit, Coord, ComplexCoord, Param, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Number;
  double number = 0.0;   // Number: a non-negative real literal
  cplx param{};          // Param: bound value
  int index = -1;        // Coord: coordinate index; ComplexCoord: x index
  int index2 = -1;       // ComplexCoord: y index
  int exponent = 0;      // Pow
  Fn fn = Fn::Exp;       // Call
  std::string name;      // Coord, ComplexCoord, Param
  std::vector<NodePtr> kids;
};

namespace expr_detail {

inline NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

inline NodePtr number(double v) {
  Node n;
  n.op = Op::Number;
  n.number = v;
  return make(std::move(n));
}

inline NodePtr binary(Op op, NodePtr a, NodePtr b) {
  Node n;
  n.op = op;
  n.kids = {std::move(a), std::move(b)};
  return make(std::move(n));
}

inline NodePtr unary_neg(NodePtr a) {
  Node n;
  n.op = Op::Neg;
  n.kids = {std::move(a)};
  return make(std::move(n));
}

inline int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void print(const Node& n, std::string& out);

inline void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

inline void print(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Number: out += format_number(n.number); break;
    case Op::ImagUnit: out += 'i'; break;
    case Op::Coord:
    case Op::ComplexCoord:
    case Op::Param: out += n.name; break;
    case Op::Neg:
      out += '-';
      print_child(*n.kids[0], 3, out);
      break;
    case Op::Add:
    case Op::Sub:
      print_child(*n.kids[0], 1, out);
      out += n.op == Op::Add ? " + " : " - ";
      print_child(*n.kids[1], 2, out);
      break;
    case Op::Mul:
    case Op::Div:
      print_child(*n.kids[0], 2, out);
      out += n.op == Op::Mul ? "*" : "/";
      print_child(*n.kids[1], 3, out);
      break;
    case Op::Pow:
      print_child(*n.kids[0], 5, out);
      out += '^';
      if (n.exponent < 0)
        out += "(" + std::to_string(n.exponent) + ")";
      else
        out += std::to_string(n.exponent);
      break;
    case Op::Call:
      out += fn_name(n.fn);
      out += '(';
      print(*n.kids[0], out);
      out += ')';
      break;
  }
}

inline bool same(const Node& a, const Node& b) {
  if (a.op != b.op || a.kids.size() != b.kids.size()) return false;
  switch (a.op) {
    case Op::Number:
      if (a.number != b.number) return false;
      break;
    case Op::Coord:
    case Op::ComplexCoord:
      if (a.index != b.index || a.index2 != b.index2 || a.name != b.name) return false;
      break;
    case Op::Param:
      if (a.name != b.name || a.param != b.param) return false;
      break;
    case Op::Pow:
      if (a.exponent != b.exponent) return false;
      break;
    case Op::Call:
      if (a.fn != b.fn) return false;
      break;
    default: break;
  }
  for (std::size_t k = 0; k < a.kids.size(); ++k)
    if (!same(*a.kids[k], *b.kids[k])) return false;
  return true;
}

inline std::size_t count(const Node& n) {
  std::size_t c = 1;
  for (const auto& k : n.kids) c += count(*k);
  return c;
}

}  // namespace expr_detail

/// An immutable parsed expression bound to a chart.
class Expression {
 public:
  Expression(ChartPtr chart, NodePtr root)
      : chart_(std::move(chart)), root_(std::move(root)) {}

  const Chart& chart() const { return *chart_; }
  const ChartPtr& chart_ptr() const { return chart_; }
  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }

  std::string to_string() const {
    std::string s;
    expr_detail::print(*root_, s);
    return s;
  }

  std::size_t node_count() const { return expr_detail::count(*root_); }

  bool same_tree(const Expression& other) const {
    return expr_detail::same(*root_, *other.root_);
  }

  /// Value, gradient and Hessian at a point of the chart.
  Jet2 jet(std::span<const double> p) const;
  cplx value(std::span<const double> p) const { return jet(p).value; }

  static Expression constant(ChartPtr chart, cplx c);
  static Expression coordinate(ChartPtr chart, std::string_view name);

  /// Re-binds coordinate symbols by name onto another chart.
  Expression rebind(ChartPtr other) const;

 private:
  ChartPtr chart_;
  NodePtr root_;
};

namespace expr_detail {

class Parser {
 public:
  Parser(std::string_view text, const ChartPtr& chart,
         const std::map<std::string, cplx>& params,
         const std::map<std::string, Expression>* lets)
      : s_(text), chart_(chart), params_(params), lets_(lets) {}

  NodePtr parse_all() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = binary(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = binary(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = binary(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = binary(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return unary_neg(unary());
    return power();
  }

  int integer_exponent() {
    skip();
    bool paren = accept('(');
    bool neg = accept('-');
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    const std::string digits(s_.substr(start, pos_ - start));
    if (digits.size() > 6) fail("exponent too large");
    int e = std::stoi(digits);
    if (paren && !accept(')')) fail("expected ')'");
    return neg ? -e : e;
  }

  NodePtr power() {
    NodePtr b = base();
    if (accept('^')) {
      Node n;
      n.op = Op::Pow;
      n.exponent = integer_exponent();
      n.kids = {b};
      return make(std::move(n));
    }
    return b;
  }

  NodePtr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number_literal() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        digits();
      else
        pos_ = save;
    }
    const std::string text(s_.substr(start, pos_ - start));
    if (text == ".") fail("malformed number");
    return number(std::stod(text));
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      auto f = fn_from_name(id);
      if (!f) {
        pos_ = start;
        fail("unknown function '" + id + "'");
      }
      ++pos_;
      skip();
      if (pos_ < s_.size() && s_[pos_] == ')') fail("arity mismatch: " + id + " takes 1 argument, got 0");
      NodePtr arg = expr();
      if (accept(',')) fail("arity mismatch: " + id + " takes 1 argument");
      if (!accept(')')) fail("expected ')'");
      Node n;
      n.op = Op::Call;
      n.fn = *f;
      n.kids = {arg};
      return make(std::move(n));
    }
    if (fn_from_name(id)) {
      pos_ = start;
      fail("arity mismatch: function '" + id + "' used without argument");
    }
    if (id == "i") {
      Node n;
      n.op = Op::ImagUnit;
      return make(std::move(n));
    }
    if (auto idx = chart_->index_of(id)) {
      Node n;
      n.op = Op::Coord;
      n.index = *idx;
      n.name = id;
      return make(std::move(n));
    }
    if (const ComplexPair* p = chart_->pair(id)) {
      Node n;
      n.op = Op::ComplexCoord;
      n.index = p->x;
      n.index2 = p->y;
      n.name = id;
      return make(std::move(n));
    }
    if (lets_) {
      auto it = lets_->find(id);
      if (it != lets_->end()) {
        if (it->second.chart_ptr() != chart_) return it->second.rebind(chart_).root_ptr();
        return it->second.root_ptr();
      }
    }
    auto it = params_.find(id);
    if (it != params_.end()) {
      Node n;
      n.op = Op::Param;
      n.name = id;
      n.param = it->second;
      return make(std::move(n));
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const ChartPtr& chart_;
  const std::map<std::string, cplx>& params_;
  const std::map<std::string, Expression>* lets_;
};

inline Jet2 eval(const Node& n, std::span<const double> p, int dim);

[[noreturn]] inline void domain_fail(const std::string& what, const Node& n) {
  std::string s;
  print(n, s);
  throw DomainError(what + " in '" + s + "'");
}

inline Jet2 checked(Jet2 j, const Node& n) {
  if (!is_finite(j)) domain_fail("non-finite value", n);
  return j;
}

inline Jet2 eval(const Node& n, std::span<const double> p, int dim) {
  switch (n.op) {
    case Op::Number: return Jet2::constant(dim, n.number);
    case Op::ImagUnit: return Jet2::constant(dim, cplx(0.0, 1.0));
    case Op::Param: return Jet2::constant(dim, n.param);
    case Op::Coord: return Jet2::coordinate(dim, n.index, p[n.index]);
    case Op::ComplexCoord: {
      Jet2 j = Jet2::constant(dim, cplx(p[n.index], p[n.index2]));
      j.grad[n.index] = 1.0;
      j.grad[n.index2] = cplx(0.0, 1.0);
      return j;
    }
    case Op::Neg: return -eval(*n.kids[0], p, dim);
    case Op::Add: return eval(*n.kids[0], p, dim) + eval(*n.kids[1], p, dim);
    case Op::Sub: return eval(*n.kids[0], p, dim) - eval(*n.kids[1], p, dim);
    case Op::Mul: return eval(*n.kids[0], p, dim) * eval(*n.kids[1], p, dim);
    case Op::Div: {
      Jet2 a = eval(*n.kids[0], p, dim);
      Jet2 b = eval(*n.kids[1], p, dim);
      if (b.value == cplx(0.0)) domain_fail("division by zero", n);
      return checked(a / b, n);
    }
    case Op::Pow: {
      Jet2 a = eval(*n.kids[0], p, dim);
      if (n.exponent == 0) return Jet2::constant(dim, 1.0);
      if (n.exponent > 0) return checked(pow_positive(a, n.exponent), n);
      if (a.value == cplx(0.0)) domain_fail("division by zero", n);
      return checked(reciprocal(pow_positive(a, -n.exponent)), n);
    }
    case Op::Call: {
      Jet2 a = eval(*n.kids[0], p, dim);
      switch (n.fn) {
        case Fn::Exp: return checked(exp(a), n);
        case Fn::Log:
          if (a.value == cplx(0.0)) domain_fail("log of zero", n);
          return checked(log(a), n);
        case Fn::Sqrt:
          if (a.value == cplx(0.0)) domain_fail("sqrt at branch point zero", n);
          return checked(sqrt(a), n);
        case Fn::Sin: return sin(a);
        case Fn::Cos: return cos(a);
        case Fn::Conj: return conj(a);
        case Fn::Re: return re(a);
        case Fn::Im: return im(a);
      }
    }
  }
  domain_fail("unknown node", n);
}

inline NodePtr rebind(const Node& n, const Chart& target) {
  Node copy = n;
  if (n.op == Op::Coord || n.op == Op::ComplexCoord) {
    if (n.op == Op::Coord) {
      if (auto idx = target.index_of(n.name)) {
        copy.index = *idx;
        return make(std::move(copy));
      }
    } else if (const ComplexPair* p = target.pair(n.name)) {
      copy.index = p->x;
      copy.index2 = p->y;
      return make(std::move(copy));
    }
    throw PreconditionError("rebind: chart '" + target.name() + "' has no coordinate " + n.name);
  }
  copy.kids.clear();
  for (const auto& k : n.kids) copy.kids.push_back(rebind(*k, target));
  return make(std::move(copy));
}

}  // namespace expr_detail

inline Jet2 Expression::jet(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != chart_->dim())
    throw PreconditionError("point has " + std::to_string(p.size()) +
                            " coordinates, chart '" + chart_->name() + "' has " +
                            std::to_string(chart_->dim()));
  return expr_detail::eval(*root_, p, chart_->dim());
}

inline Expression Expression::rebind(ChartPtr other) const {
  NodePtr r = expr_detail::rebind(*root_, *other);
  return Expression(std::move(other), std::move(r));
}

/// Parses `text` over `chart`. Identifiers resolve, in order, to the imaginary
/// unit `i`, coordinates, complex coordinates, `lets` (substituted as
/// subtrees) and `params`.
inline Expression parse(std::string_view text, const ChartPtr& chart,
                        const std::map<std::string, cplx>& params = {},
                        const std::map<std::string, Expression>* lets = nullptr) {
  expr_detail::Parser parser(text, chart, params, lets);
  NodePtr root = parser.parse_all();
  return Expression(chart, std::move(root));
}

inline Jet2 eval_jet2(const Expression& e, std::span<const double> p) { return e.jet(p); }

struct Wirtinger {
  cplx dw;
  cplx dwbar;
};

/// d/dw = (d_x - i d_y)/2 and d/dwbar = (d_x + i d_y)/2 at p.
inline Wirtinger wirtinger(const Jet2& j, const ComplexPair& pair) {
  const cplx dx = j.grad[pair.x], dy = j.grad[pair.y];
  const cplx i(0.0, 1.0);
  return {0.5 * (dx - i * dy), 0.5 * (dx + i * dy)};
}

inline Wirtinger wirtinger(const Expression& e, std::span<const double> p,
                           std::string_view pair_name) {
  const ComplexPair* pair = e.chart().pair(pair_name);
  if (!pair) throw PreconditionError("chart has no complex pair " + std::string(pair_name));
  return wirtinger(e.jet(p), *pair);
}

// Tree builders. They only assemble nodes; no simplification beyond dropping
// exact literal zeros and ones.

inline Expression Expression::constant(ChartPtr chart, cplx c) {
  using namespace expr_detail;
  auto real_part = [](double v) {
    NodePtr n = number(std::abs(v));
    return v < 0 ? unary_neg(n) : n;
  };
  Node iu;
  iu.op = Op::ImagUnit;
  NodePtr imag_unit = make(std::move(iu));
  NodePtr root;
  if (c.imag() == 0.0) {
    root = real_part(c.real());
  } else {
    NodePtr im_part = c.imag() == 1.0 ? imag_unit
                      : c.imag() == -1.0
                          ? unary_neg(imag_unit)
                          : binary(Op::Mul, real_part(c.imag()), imag_unit);
    root = c.real() == 0.0 ? im_part : binary(Op::Add, real_part(c.real()), im_part);
  }
  return Expression(std::move(chart), std::move(root));
}

inline Expression Expression::coordinate(ChartPtr chart, std::string_view name) {
  return parse(name, chart);
}

namespace expr_detail {

inline bool is_literal(const Expression& e, double v) {
  return e.root().op == Op::Number && e.root().number == v;
}

inline void same_chart(const Expression& a, const Expression& b) {
  if (a.chart_ptr() != b.chart_ptr() && a.chart().coord_names() != b.chart().coord_names())
    throw PreconditionError("expressions over different charts");
}

}  // namespace expr_detail

inline Expression operator+(const Expression& a, const Expression& b) {
  expr_detail::same_chart(a, b);
  if (expr_detail::is_literal(a, 0.0)) return b;
  if (expr_detail::is_literal(b, 0.0)) return a;
  return Expression(a.chart_ptr(), expr_detail::binary(Op::Add, a.root_ptr(), b.root_ptr()));
}

inline Expression operator-(const Expression& a, const Expression& b) {
  expr_detail::same_chart(a, b);
  if (expr_detail::is_literal(b, 0.0)) return a;
  if (expr_detail::is_literal(a, 0.0))
    return Expression(a.chart_ptr(), expr_detail::unary_neg(b.root_ptr()));
  return Expression(a.chart_ptr(), expr_detail::binary(Op::Sub, a.root_ptr(), b.root_ptr()));
}

inline Expression operator-(const Expression& a) {
  if (expr_detail::is_literal(a, 0.0)) return a;
  return Expression(a.chart_ptr(), expr_detail::unary_neg(a.root_ptr()));
}

inline Expression operator*(const Expression& a, const Expression& b) {
  expr_detail::same_chart(a, b);
  if (expr_detail::is_literal(a, 0.0)) return a;
  if (expr_detail::is_literal(b, 0.0)) return b;
  if (expr_detail::is_literal(a, 1.0)) return b;
  if (expr_detail::is_literal(b, 1.0)) return a;
  return Expression(a.chart_ptr(), expr_detail::binary(Op::Mul, a.root_ptr(), b.root_ptr()));
}

inline Expression operator/(const Expression& a, const Expression& b) {
  expr_detail::same_chart(a, b);
  if (expr_detail::is_literal(a, 0.0)) return a;
  if (expr_detail::is_literal(b, 1.0)) return a;
  return Expression(a.chart_ptr(), expr_detail::binary(Op::Div, a.root_ptr(), b.root_ptr()));
}

inline Expression operator*(cplx c, const Expression& a) {
  return Expression::constant(a.chart_ptr(), c) * a;
}

inline Expression call(Fn f, const Expression& a) {
  Node n;
  n.op = Op::Call;
  n.fn = f;
  n.kids = {a.root_ptr()};
  return Expression(a.chart_ptr(), expr_detail::make(std::move(n)));
}

inline Expression conj(const Expression& a) {
  if (a.root().op == Op::Number) return a;
  return call(Fn::Conj, a);
}

inline bool is_zero_literal(const Expression& e) { return expr_detail::is_literal(e, 0.0); }

}  // namespace robinson
