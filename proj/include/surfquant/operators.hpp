#pragma once

// First-order differential operators with symbolic coefficients.
//
// A FirstOrderOp is (-i hbar)^k (sum_i a_i d_i + b) with real Expr
// coefficients. Products by i hbar only shift k and flip signs, so every
// identity of the momentum algebra is checked in real arithmetic.

#include <span>
#include <vector>

#include "surfquant/expr.hpp"
#include "surfquant/linalg.hpp"
#include "surfquant/surface.hpp"

namespace surfquant {

struct FirstOrderOp {
  int n = 0;
  int ih_power = 0;       // number of (-i hbar) factors
  std::vector<Expr> a;    // coefficients of d/dx_i
  Expr b;                 // zeroth-order part

  /// True when every coefficient folds to the constant 0.
  bool is_zero() const;
};

/// Multiplication by g (k = 0, a = 0, b = g).
FirstOrderOp multiplication(const Expr& g);
/// Plain d/dx_i with k = 0.
FirstOrderOp derivative(int dim, int i);
/// Coordinate operator x_i as a multiplication.
FirstOrderOp coordinate(int dim, int i);

/// Sum of two operators. Powers must agree unless one side is zero.
FirstOrderOp operator+(const FirstOrderOp& x, const FirstOrderOp& y);
FirstOrderOp operator-(const FirstOrderOp& x, const FirstOrderOp& y);
/// Left multiplication g * A.
FirstOrderOp operator*(const Expr& g, const FirstOrderOp& x);
FirstOrderOp operator*(double c, const FirstOrderOp& x);
/// Composition A o g (multiply first, then apply A).
FirstOrderOp right_multiply(const FirstOrderOp& x, const Expr& g, Differentiator& d);
/// i hbar * A, i.e. -(-i hbar) * A.
FirstOrderOp times_i_hbar(const FirstOrderOp& x);

/// p_i = -i hbar (d_i - n_i sum_j n_j d_j).
FirstOrderOp projected_momentum(const ImplicitSurface& s, int i);
/// Formal adjoint of p_i in the ambient Lebesgue measure:
/// p_i + i hbar sum_j d_j(n_i n_j).
FirstOrderOp adjoint_momentum(const ImplicitSurface& s, int i);
/// (p_i + p_i^dagger) / 2.
FirstOrderOp symmetrized_momentum(const ImplicitSurface& s, int i);
/// w_i = sum_j d_j(n_i n_j), symbolic.
Expr normal_divergence_term(const ImplicitSurface& s, int i, Differentiator& d);

/// Exact commutator; powers add.
FirstOrderOp commutator(const FirstOrderOp& x, const FirstOrderOp& y, Differentiator& d);
FirstOrderOp commutator(const FirstOrderOp& x, const FirstOrderOp& y);

struct OpResidual {
  Vec point;
  double residual = 0.0;
};

/// Largest absolute coefficient difference between two operators at x.
/// When the powers differ each side must vanish on its own.
OpResidual op_residual(const FirstOrderOp& x, const FirstOrderOp& y, const Vec& point);

struct AlgebraResidual {
  double coordinate = 0.0;   // [x_i, p_j] against i hbar P_ij
  double momentum = 0.0;     // [p_i, p_j] against the normal-Hessian right side
  double symmetrized = 0.0;  // [p~_i, p~_j] against its symmetric ordering
  double max() const noexcept;
};

/// Checks the commutator algebra of the projected momenta at p for the pair
/// (i, j), both in the plain and the symmetrized ordering.
AlgebraResidual dirac_algebra_residual(const ImplicitSurface& s, int i, int j, const SurfacePoint& p);

/// [p_i, p_j] against i hbar / |x|^2 (p_i o x_j - p_j o x_i), the ordering
/// special to spheres centred at the origin.
OpResidual sphere_ordering_residual(const ImplicitSurface& s, int i, int j, const Vec& point);

/// Cyclic sum [A,[B,C]] + [B,[C,A]] + [C,[A,B]] for A, B, C = p_i, p_j, p_k.
OpResidual jacobi_residual(const ImplicitSurface& s, int i, int j, int k, const Vec& point);

/// Coefficients of sum_i (d_i f) p_i at p and at five points pushed off the
/// surface along the normal; returns the largest.
OpResidual constraint_identity_residual(const ImplicitSurface& s, const SurfacePoint& p);

/// Applies the composition ops[0] o ops[1] o ... to u at x (so the last
/// operator acts first). Returns the real coefficient of (-i hbar)^K with K
/// the sum of the powers. At most two operators.
double apply(std::span<const FirstOrderOp> ops, const Expr& u, const Vec& x);

}  // namespace surfquant
