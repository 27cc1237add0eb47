#pragma once

// Order-3 forward-mode Taylor jets in n <= kMaxDim variables.
//
// A Jet3 holds value, gradient, Hessian and third-derivative tensor of a
// scalar field at one point, densely. Arithmetic is Leibniz for products and
// Faa di Bruno for compositions, truncated at the jet's order. Only the
// sorted index simplex i <= j <= k is computed; the remaining entries are
// mirrored, so the symmetry invariants hold bit-exactly.

#include <array>
#include <span>
#include <vector>

#include "surfquant/expr.hpp"

namespace surfquant {

class Jet3 {
 public:
  /// Zero jet. `order` in [0, 3]; entries above it stay zero.
  Jet3(int dim, int order);

  static Jet3 constant(int dim, int order, double c);
  static Jet3 variable(int dim, int order, int index, double x);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }

  double value() const noexcept { return v_; }
  double grad(int i) const noexcept { return g_[static_cast<std::size_t>(i)]; }
  double hess(int i, int j) const noexcept { return h_[static_cast<std::size_t>(i * dim_ + j)]; }
  double third(int i, int j, int k) const noexcept {
    return t_[static_cast<std::size_t>((i * dim_ + j) * dim_ + k)];
  }

  void set_value(double v) noexcept { v_ = v; }
  void set_grad(int i, double v) noexcept { g_[static_cast<std::size_t>(i)] = v; }
  /// Writes both (i,j) and (j,i).
  void set_hess(int i, int j, double v) noexcept;
  /// Writes all index permutations of (i,j,k).
  void set_third(int i, int j, int k, double v) noexcept;

  /// Jet of the partial derivative d/dx_i, one order lower.
  Jet3 partial(int i) const;

  /// Same data truncated to a lower order.
  Jet3 truncated(int order) const;

  bool all_finite() const noexcept;

 private:
  int dim_;
  int order_;
  double v_ = 0.0;
  std::vector<double> g_;
  std::vector<double> h_;
  std::vector<double> t_;
};

Jet3 operator+(const Jet3& a, const Jet3& b);
Jet3 operator-(const Jet3& a, const Jet3& b);
Jet3 operator*(const Jet3& a, const Jet3& b);
/// Throws DomainError when b's value is zero.
Jet3 operator/(const Jet3& a, const Jet3& b);
Jet3 operator-(const Jet3& a);
Jet3 operator*(double s, const Jet3& a);
Jet3 operator+(const Jet3& a, double c);

enum class Elementary { sin, cos, exp, log, sqrt, reciprocal, power };

/// phi(a) given phi and its first three derivatives at a.value().
Jet3 compose(const std::array<double, 4>& phi, const Jet3& a);

/// Elementary function applied to a jet. `exponent` is used by
/// Elementary::power only. Throws DomainError outside the domain.
Jet3 compose(Elementary f, const Jet3& a, int exponent = 0);

/// Jet of `e` at `x` up to `order`. Throws DomainError naming the offending
/// subexpression when evaluation leaves the domain.
Jet3 eval_jet(const Expr& e, std::span<const double> x, int order);

}  // namespace surfquant
