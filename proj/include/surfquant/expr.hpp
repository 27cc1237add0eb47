#pragma once

// Scalar fields on R^n as immutable expression trees.
//
// An Expr is a shared, immutable DAG of nodes over the variables x1..xn.
// Builders fold constants and drop neutral elements, so symbolic derivatives
// of simple surfaces stay small. Evaluation is memoized per node, so shared
// subtrees are computed once.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "surfquant/error.hpp"

namespace surfquant {

/// Largest ambient dimension accepted anywhere in the library.
inline constexpr int kMaxDim = 8;

enum class ExprKind {
  constant,
  variable,
  negate,
  add,
  subtract,
  multiply,
  divide,
  power,  // integer exponent stored in Node::index
  sin,
  cos,
  exp,
  log,
  sqrt,
};

class Expr {
 public:
  struct Node {
    ExprKind kind = ExprKind::constant;
    double value = 0.0;  // constant payload
    int index = 0;       // variable index (0-based) or integer exponent
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  /// Wraps an existing node. Throws std::invalid_argument on a bad dimension.
  Expr(NodePtr node, int dim);

  static Expr constant(int dim, double c);
  /// Coordinate x_{index+1}; index is 0-based.
  static Expr variable(int dim, int index);

  int dim() const noexcept { return dim_; }
  const Node& node() const noexcept { return *node_; }
  const NodePtr& node_ptr() const noexcept { return node_; }

  std::optional<double> constant_value() const noexcept;
  bool is_zero() const noexcept;

  /// Plain value at x. Throws DomainError outside the domain.
  double operator()(std::span<const double> x) const;

  /// Re-parseable text in the input grammar.
  std::string to_string() const;

  /// Number of distinct nodes reachable from the root.
  std::size_t node_count() const;

 private:
  NodePtr node_;
  int dim_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator/(const Expr& a, double b);
Expr operator/(double a, const Expr& b);

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

/// |x| = sqrt(x1^2 + ... + xn^2).
Expr norm(int dim);

/// Sum of a non-empty list of expressions.
Expr sum(std::span<const Expr> terms);

/// Symbolic partial derivative with respect to x_{index+1}.
Expr differentiate(const Expr& e, int index);

/// Memoizing differentiator. Repeated derivatives of shared subtrees return
/// shared nodes, which keeps nested commutator coefficients compact.
/// Not thread-safe; use one instance per thread.
class Differentiator {
 public:
  Expr operator()(const Expr& e, int index);

 private:
  struct Key {
    const Expr::Node* node;
    int index;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct Entry {
    Expr::NodePtr source;  // keeps the key address alive
    Expr::NodePtr derivative;
  };
  Expr::NodePtr derive(const Expr::NodePtr& node, int index, int dim);

  std::unordered_map<Key, Entry, KeyHash> memo_;
};

struct ParseDiagnostic {
  std::size_t offset = 0;
  std::string message;
  std::vector<std::string> expected;

  std::string to_string() const;
};

class ParseError : public Error {
 public:
  explicit ParseError(ParseDiagnostic diagnostic);
  const ParseDiagnostic& diagnostic() const noexcept { return diagnostic_; }

 private:
  ParseDiagnostic diagnostic_;
};

/// Parses the expression grammar
///
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := atom ("^" integer)* | "-" factor
///   atom   := number | "x" integer | func "(" expr ")" | "(" expr ")"
///   func   := sin | cos | exp | log | sqrt
///
/// with variables x1..xn. Repeated "^" associates to the right.
/// Throws ParseError.
Expr parse(std::string_view text, int dim);

}  // namespace surfquant
