#include "surfquant/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace surfquant {
namespace {

using NodePtr = Expr::NodePtr;

NodePtr make_constant(double c) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::constant;
  n->value = c;
  return n;
}

NodePtr make_node(ExprKind kind, NodePtr lhs, NodePtr rhs = nullptr, int index = 0) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->index = index;
  return n;
}

std::optional<double> const_of(const NodePtr& n) {
  if (n->kind == ExprKind::constant) return n->value;
  return std::nullopt;
}

bool is_const(const NodePtr& n, double c) {
  return n->kind == ExprKind::constant && n->value == c;
}

double int_power(double base, int exponent) {
  return std::pow(base, static_cast<double>(exponent));
}

// Node builders with local simplification.

NodePtr node_neg(const NodePtr& a) {
  if (auto c = const_of(a)) return make_constant(-*c);
  if (a->kind == ExprKind::negate) return a->lhs;
  return make_node(ExprKind::negate, a);
}

NodePtr node_add(const NodePtr& a, const NodePtr& b) {
  auto ca = const_of(a);
  auto cb = const_of(b);
  if (ca && cb) return make_constant(*ca + *cb);
  if (ca && *ca == 0.0) return b;
  if (cb && *cb == 0.0) return a;
  if (b->kind == ExprKind::negate) return make_node(ExprKind::subtract, a, b->lhs);
  return make_node(ExprKind::add, a, b);
}

NodePtr node_sub(const NodePtr& a, const NodePtr& b) {
  auto ca = const_of(a);
  auto cb = const_of(b);
  if (ca && cb) return make_constant(*ca - *cb);
  if (cb && *cb == 0.0) return a;
  if (ca && *ca == 0.0) return node_neg(b);
  if (a == b) return make_constant(0.0);
  if (b->kind == ExprKind::negate) return make_node(ExprKind::add, a, b->lhs);
  return make_node(ExprKind::subtract, a, b);
}

NodePtr node_mul(const NodePtr& a, const NodePtr& b) {
  auto ca = const_of(a);
  auto cb = const_of(b);
  if (ca && cb) return make_constant(*ca * *cb);
  if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return make_constant(0.0);
  if (ca && *ca == 1.0) return b;
  if (cb && *cb == 1.0) return a;
  if (ca && *ca == -1.0) return node_neg(b);
  if (cb && *cb == -1.0) return node_neg(a);
  if (a->kind == ExprKind::negate && b->kind == ExprKind::negate)
    return make_node(ExprKind::multiply, a->lhs, b->lhs);
  if (a->kind == ExprKind::negate) return node_neg(make_node(ExprKind::multiply, a->lhs, b));
  if (b->kind == ExprKind::negate) return node_neg(make_node(ExprKind::multiply, a, b->lhs));
  return make_node(ExprKind::multiply, a, b);
}

NodePtr node_div(const NodePtr& a, const NodePtr& b) {
  auto ca = const_of(a);
  auto cb = const_of(b);
  if (ca && *ca == 0.0) return make_constant(0.0);
  if (cb && *cb == 1.0) return a;
  if (ca && cb && *cb != 0.0) return make_constant(*ca / *cb);
  if (a == b) return make_constant(1.0);
  return make_node(ExprKind::divide, a, b);
}

NodePtr node_pow(const NodePtr& a, int m) {
  if (m == 0) return make_constant(1.0);
  if (m == 1) return a;
  if (auto c = const_of(a)) {
    if (*c != 0.0 || m > 0) return make_constant(int_power(*c, m));
  }
  if (a->kind == ExprKind::power) {
    long long combined = static_cast<long long>(a->index) * m;
    if (combined <= 4096 && combined >= -4096) return node_pow(a->lhs, static_cast<int>(combined));
  }
  return make_node(ExprKind::power, a, nullptr, m);
}

NodePtr node_func(ExprKind kind, const NodePtr& a) {
  if (auto c = const_of(a)) {
    switch (kind) {
      case ExprKind::sin: return make_constant(std::sin(*c));
      case ExprKind::cos: return make_constant(std::cos(*c));
      case ExprKind::exp: return make_constant(std::exp(*c));
      case ExprKind::log:
        if (*c > 0.0) return make_constant(std::log(*c));
        break;
      case ExprKind::sqrt:
        if (*c >= 0.0) return make_constant(std::sqrt(*c));
        break;
      default: break;
    }
  }
  return make_node(kind, a);
}

// Printing. Precedence levels: 1 additive, 2 multiplicative, 3 unary minus,
// 4 power, 5 atom.

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int precedence(const Expr::Node& n) {
  switch (n.kind) {
    case ExprKind::add:
    case ExprKind::subtract: return 1;
    case ExprKind::multiply:
    case ExprKind::divide: return 2;
    case ExprKind::negate: return 3;
    case ExprKind::power: return n.index < 0 ? 2 : 4;
    case ExprKind::constant: return n.value < 0.0 ? 3 : 5;
    default: return 5;
  }
}

void print(const Expr::Node& n, int min_prec, std::string& out);

void print_child(const Expr::Node& n, int min_prec, std::string& out) {
  if (precedence(n) < min_prec) {
    out += '(';
    print(n, 0, out);
    out += ')';
  } else {
    print(n, min_prec, out);
  }
}

const char* function_name(ExprKind kind) {
  switch (kind) {
    case ExprKind::sin: return "sin";
    case ExprKind::cos: return "cos";
    case ExprKind::exp: return "exp";
    case ExprKind::log: return "log";
    case ExprKind::sqrt: return "sqrt";
    default: return "?";
  }
}

void print(const Expr::Node& n, int min_prec, std::string& out) {
  switch (n.kind) {
    case ExprKind::constant:
      out += format_number(n.value);
      return;
    case ExprKind::variable:
      out += 'x';
      out += std::to_string(n.index + 1);
      return;
    case ExprKind::negate:
      out += '-';
      print_child(*n.lhs, 4, out);
      return;
    case ExprKind::add:
      print_child(*n.lhs, 1, out);
      out += '+';
      print_child(*n.rhs, 2, out);
      return;
    case ExprKind::subtract:
      print_child(*n.lhs, 1, out);
      out += '-';
      print_child(*n.rhs, 2, out);
      return;
    case ExprKind::multiply:
      print_child(*n.lhs, 2, out);
      out += '*';
      print_child(*n.rhs, 4, out);
      return;
    case ExprKind::divide:
      print_child(*n.lhs, 2, out);
      out += '/';
      print_child(*n.rhs, 4, out);
      return;
    case ExprKind::power:
      if (n.index < 0) {
        out += "1/";
        print_child(*n.lhs, 5, out);
        out += '^';
        out += std::to_string(-n.index);
      } else {
        print_child(*n.lhs, 5, out);
        out += '^';
        out += std::to_string(n.index);
      }
      return;
    default:
      out += function_name(n.kind);
      out += '(';
      print(*n.lhs, 0, out);
      out += ')';
      return;
  }
  (void)min_prec;
}

std::string node_text(const Expr::Node& n) {
  std::string out;
  print(n, 0, out);
  return out;
}

class ValueEvaluator {
 public:
  explicit ValueEvaluator(std::span<const double> x) : x_(x) {}

  double eval(const NodePtr& p) {
    const Expr::Node& n = *p;
    switch (n.kind) {
      case ExprKind::constant: return n.value;
      case ExprKind::variable: return x_[static_cast<std::size_t>(n.index)];
      default: break;
    }
    if (auto it = memo_.find(p.get()); it != memo_.end()) return it->second;
    double r = compute(n);
    memo_.emplace(p.get(), r);
    return r;
  }

 private:
  double compute(const Expr::Node& n) {
    switch (n.kind) {
      case ExprKind::negate: return -eval(n.lhs);
      case ExprKind::add: return eval(n.lhs) + eval(n.rhs);
      case ExprKind::subtract: return eval(n.lhs) - eval(n.rhs);
      case ExprKind::multiply: return eval(n.lhs) * eval(n.rhs);
      case ExprKind::divide: {
        double d = eval(n.rhs);
        if (d == 0.0) throw DomainError("division by zero", node_text(n));
        return eval(n.lhs) / d;
      }
      case ExprKind::power: {
        double b = eval(n.lhs);
        if (b == 0.0 && n.index < 0) throw DomainError("zero raised to a negative power", node_text(n));
        return int_power(b, n.index);
      }
      case ExprKind::sin: return std::sin(eval(n.lhs));
      case ExprKind::cos: return std::cos(eval(n.lhs));
      case ExprKind::exp: return std::exp(eval(n.lhs));
      case ExprKind::log: {
        double a = eval(n.lhs);
        if (!(a > 0.0)) throw DomainError("log of a nonpositive value", node_text(n));
        return std::log(a);
      }
      case ExprKind::sqrt: {
        double a = eval(n.lhs);
        if (a < 0.0) throw DomainError("sqrt of a negative value", node_text(n));
        return std::sqrt(a);
      }
      default: break;
    }
    throw std::logic_error("unhandled expression node");
  }

  std::span<const double> x_;
  std::unordered_map<const Expr::Node*, double> memo_;
};

void check_same_dim(const Expr& a, const Expr& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("expression dimensions differ");
}

}  // namespace

Expr::Expr(NodePtr node, int dim) : node_(std::move(node)), dim_(dim) {
  if (!node_) throw std::invalid_argument("null expression node");
  if (dim_ < 1 || dim_ > kMaxDim)
    throw std::invalid_argument("expression dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

Expr Expr::constant(int dim, double c) { return Expr(make_constant(c), dim); }

Expr Expr::variable(int dim, int index) {
  if (index < 0 || index >= dim) throw std::invalid_argument("variable index out of range");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::variable;
  n->index = index;
  return Expr(std::move(n), dim);
}

std::optional<double> Expr::constant_value() const noexcept { return const_of(node_); }

bool Expr::is_zero() const noexcept { return is_const(node_, 0.0); }

double Expr::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("point dimension mismatch");
  ValueEvaluator ev(x);
  return ev.eval(node_);
}

std::string Expr::to_string() const { return node_text(*node_); }

std::size_t Expr::node_count() const {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{node_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
  return seen.size();
}

Expr operator+(const Expr& a, const Expr& b) {
  check_same_dim(a, b);
  return Expr(node_add(a.node_ptr(), b.node_ptr()), a.dim());
}
Expr operator-(const Expr& a, const Expr& b) {
  check_same_dim(a, b);
  return Expr(node_sub(a.node_ptr(), b.node_ptr()), a.dim());
}
Expr operator*(const Expr& a, const Expr& b) {
  check_same_dim(a, b);
  return Expr(node_mul(a.node_ptr(), b.node_ptr()), a.dim());
}
Expr operator/(const Expr& a, const Expr& b) {
  check_same_dim(a, b);
  return Expr(node_div(a.node_ptr(), b.node_ptr()), a.dim());
}
Expr operator-(const Expr& a) { return Expr(node_neg(a.node_ptr()), a.dim()); }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(a.dim(), b); }
Expr operator+(double a, const Expr& b) { return Expr::constant(b.dim(), a) + b; }
Expr operator-(const Expr& a, double b) { return a - Expr::constant(a.dim(), b); }
Expr operator-(double a, const Expr& b) { return Expr::constant(b.dim(), a) - b; }
Expr operator*(double a, const Expr& b) { return Expr::constant(b.dim(), a) * b; }
Expr operator*(const Expr& a, double b) { return a * Expr::constant(a.dim(), b); }
Expr operator/(const Expr& a, double b) { return a / Expr::constant(a.dim(), b); }
Expr operator/(double a, const Expr& b) { return Expr::constant(b.dim(), a) / b; }

Expr pow(const Expr& base, int exponent) { return Expr(node_pow(base.node_ptr(), exponent), base.dim()); }
Expr sin(const Expr& a) { return Expr(node_func(ExprKind::sin, a.node_ptr()), a.dim()); }
Expr cos(const Expr& a) { return Expr(node_func(ExprKind::cos, a.node_ptr()), a.dim()); }
Expr exp(const Expr& a) { return Expr(node_func(ExprKind::exp, a.node_ptr()), a.dim()); }
Expr log(const Expr& a) { return Expr(node_func(ExprKind::log, a.node_ptr()), a.dim()); }
Expr sqrt(const Expr& a) { return Expr(node_func(ExprKind::sqrt, a.node_ptr()), a.dim()); }

Expr norm(int dim) {
  std::vector<Expr> squares;
  for (int i = 0; i < dim; ++i) squares.push_back(pow(Expr::variable(dim, i), 2));
  return sqrt(sum(squares));
}

Expr sum(std::span<const Expr> terms) {
  if (terms.empty()) throw std::invalid_argument("sum of an empty list");
  Expr acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = acc + terms[i];
  return acc;
}

// ---------------------------------------------------------------------------
// Differentiation

std::size_t Differentiator::KeyHash::operator()(const Key& k) const noexcept {
  return std::hash<const void*>()(k.node) ^ (static_cast<std::size_t>(k.index) * 0x9e3779b97f4a7c15ULL);
}

Expr Differentiator::operator()(const Expr& e, int index) {
  if (index < 0 || index >= e.dim()) throw std::invalid_argument("derivative index out of range");
  return Expr(derive(e.node_ptr(), index, e.dim()), e.dim());
}

NodePtr Differentiator::derive(const NodePtr& p, int i, int dim) {
  const Expr::Node& n = *p;
  if (n.kind == ExprKind::constant) return make_constant(0.0);
  if (n.kind == ExprKind::variable) return make_constant(n.index == i ? 1.0 : 0.0);

  Key key{p.get(), i};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second.derivative;

  NodePtr d;
  switch (n.kind) {
    case ExprKind::negate: d = node_neg(derive(n.lhs, i, dim)); break;
    case ExprKind::add: d = node_add(derive(n.lhs, i, dim), derive(n.rhs, i, dim)); break;
    case ExprKind::subtract: d = node_sub(derive(n.lhs, i, dim), derive(n.rhs, i, dim)); break;
    case ExprKind::multiply:
      d = node_add(node_mul(derive(n.lhs, i, dim), n.rhs), node_mul(n.lhs, derive(n.rhs, i, dim)));
      break;
    case ExprKind::divide: {
      // (a/b)' = a'/b - a b' / b^2
      NodePtr da = derive(n.lhs, i, dim);
      NodePtr db = derive(n.rhs, i, dim);
      d = node_sub(node_div(da, n.rhs), node_div(node_mul(n.lhs, db), node_pow(n.rhs, 2)));
      break;
    }
    case ExprKind::power:
      d = node_mul(node_mul(make_constant(n.index), node_pow(n.lhs, n.index - 1)), derive(n.lhs, i, dim));
      break;
    case ExprKind::sin: d = node_mul(node_func(ExprKind::cos, n.lhs), derive(n.lhs, i, dim)); break;
    case ExprKind::cos: d = node_neg(node_mul(node_func(ExprKind::sin, n.lhs), derive(n.lhs, i, dim))); break;
    case ExprKind::exp: d = node_mul(p, derive(n.lhs, i, dim)); break;
    case ExprKind::log: d = node_div(derive(n.lhs, i, dim), n.lhs); break;
    case ExprKind::sqrt:
      d = node_div(derive(n.lhs, i, dim), node_mul(make_constant(2.0), p));
      break;
    default: throw std::logic_error("unhandled expression node");
  }
  memo_.emplace(key, Entry{p, d});
  return d;
}

Expr differentiate(const Expr& e, int index) {
  Differentiator d;
  return d(e, index);
}

// ---------------------------------------------------------------------------
// Parsing

std::string ParseDiagnostic::to_string() const {
  std::string out = "parse error at offset " + std::to_string(offset) + ": " + message;
  if (!expected.empty()) {
    out += " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out += ", ";
      out += expected[i];
    }
    out += ')';
  }
  return out;
}

ParseError::ParseError(ParseDiagnostic diagnostic)
    : Error(diagnostic.to_string()), diagnostic_(std::move(diagnostic)) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    skip_ws();
    if (at_end()) fail(pos_, "empty expression", atom_starts());
    NodePtr e = parse_expr();
    skip_ws();
    if (!at_end()) fail(pos_, "unexpected trailing input", {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return Expr(e, dim_);
  }

 private:
  static std::vector<std::string> atom_starts() {
    return {"number", "variable x<i>", "function", "'('", "'-'"};
  }

  [[noreturn]] void fail(std::size_t offset, std::string message, std::vector<std::string> expected = {}) {
    throw ParseError(ParseDiagnostic{offset, std::move(message), std::move(expected)});
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      NodePtr rhs = parse_term();
      lhs = c == '+' ? make_node(ExprKind::add, lhs, rhs) : make_node(ExprKind::subtract, lhs, rhs);
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      NodePtr rhs = parse_factor();
      lhs = c == '*' ? make_node(ExprKind::multiply, lhs, rhs) : make_node(ExprKind::divide, lhs, rhs);
    }
  }

  NodePtr parse_factor() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      return make_node(ExprKind::negate, parse_factor());
    }
    NodePtr base = parse_atom();
    skip_ws();
    if (peek() != '^') return base;

    std::vector<long long> exponents;
    while (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      exponents.push_back(parse_integer("integer exponent"));
      if (peek() == '.' || peek() == 'e' || peek() == 'E') fail(start, "exponent must be an integer", {"integer exponent"});
      skip_ws();
    }
    // a^b^c == a^(b^c)
    long long e = exponents.back();
    for (auto it = exponents.rbegin() + 1; it != exponents.rend(); ++it) {
      double v = std::pow(static_cast<double>(*it), static_cast<double>(e));
      if (v > 4096.0) fail(pos_, "exponent too large");
      e = static_cast<long long>(v);
    }
    if (e > 4096) fail(pos_, "exponent too large");
    return make_node(ExprKind::power, base, nullptr, static_cast<int>(e));
  }

  long long parse_integer(const char* what) {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail(start, std::string("expected ") + what, {what});
    std::string digits(text_.substr(start, pos_ - start));
    if (digits.size() > 9) fail(start, "integer too large");
    return std::stoll(digits);
  }

  NodePtr parse_atom() {
    skip_ws();
    std::size_t start = pos_;
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      skip_ws();
      if (peek() != ')') fail(pos_, "missing ')'", {"')'"});
      ++pos_;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (!at_end() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "x" && !at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        long long index = parse_integer("variable index");
        if (index < 1 || index > dim_)
          fail(start, "variable index " + std::to_string(index) + " outside 1.." + std::to_string(dim_));
        auto n = std::make_shared<Expr::Node>();
        n->kind = ExprKind::variable;
        n->index = static_cast<int>(index - 1);
        return n;
      }
      ExprKind kind;
      if (ident == "sin") kind = ExprKind::sin;
      else if (ident == "cos") kind = ExprKind::cos;
      else if (ident == "exp") kind = ExprKind::exp;
      else if (ident == "log") kind = ExprKind::log;
      else if (ident == "sqrt") kind = ExprKind::sqrt;
      else fail(start, "unknown identifier '" + std::string(ident) + "'", {"x<i>", "sin", "cos", "exp", "log", "sqrt"});
      skip_ws();
      if (peek() != '(') fail(pos_, "function call requires parentheses", {"'('"});
      ++pos_;
      NodePtr arg = parse_expr();
      skip_ws();
      if (peek() != ')') fail(pos_, "missing ')'", {"')'"});
      ++pos_;
      return make_node(kind, arg);
    }
    if (at_end()) fail(pos_, "unexpected end of input", atom_starts());
    fail(pos_, std::string("unexpected character '") + c + "'", atom_starts());
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t int_digits = digits();
    std::size_t frac_digits = 0;
    if (peek() == '.') {
      ++pos_;
      frac_digits = digits();
    }
    if (int_digits + frac_digits == 0) fail(start, "malformed number", {"number"});
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digits() == 0) pos_ = save;
    }
    std::string literal(text_.substr(start, pos_ - start));
    return make_constant(std::strtod(literal.c_str(), nullptr));
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw ParseError(ParseDiagnostic{0, "dimension must be in [1, " + std::to_string(kMaxDim) + "]", {}});
  return Parser(text, dim).run();
}

}  // namespace surfquant
