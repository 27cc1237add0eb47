#pragma once

// Pointwise solvability of the abelian-conversion conditions.
//
// The conversion route needs a symmetric C(x) with C n = 0 along the
// surface and n.grad C_lk = (C J)_lk + (C J)_kl, J(i, k) = d_i n_k. At a
// point these become a finite linear system in the values of C and of its
// normal derivative; tangential derivatives of C never appear in it.

#include <optional>
#include <string>
#include <vector>

#include "surfquant/expr.hpp"
#include "surfquant/linalg.hpp"
#include "surfquant/surface.hpp"

namespace surfquant {

enum class Verdict { solvable, obstructed, inconclusive };

std::string to_string(Verdict v);

struct ConversionDiagnosis {
  std::string surface;
  Vec point;
  std::string check;
  double residual = 0.0;          // residual of a supplied candidate, or the obstruction size
  int unknowns = 0;
  int rank = 0;
  Vec singular_values;            // descending
  Verdict verdict = Verdict::inconclusive;
};

struct CCandidate {
  std::vector<std::vector<Expr>> c;   // n x n, symmetric
  std::optional<std::vector<Expr>> d;
  std::optional<Expr> e;
};

struct Proportionality {
  double factor = 0.0;    // c in J ~ c P
  double residual = 0.0;  // max |J - c P|
};

/// Fits d_i n_k ~ c (delta_ik - n_i n_k) with c the mean of the tangent-block
/// eigenvalues (least squares) and returns the largest entry of the misfit.
Proportionality proportionality_residual(const ImplicitSurface& s, const SurfacePoint& p);

/// max_ik |(n.grad g)(delta_ik - n_i n_k) - 2 g d_i n_k| at p.
double g_equation_residual(const ImplicitSurface& s, const Expr& g, const SurfacePoint& p);

/// Rank analysis of the pointwise system. SVD threshold 1e-9 relative to the
/// largest singular value; singular values in [1e-9, 1e-6] relative, or a
/// verdict that flips at nearby surface points, give INCONCLUSIVE.
ConversionDiagnosis c_system_analysis(const ImplicitSurface& s, const SurfacePoint& p);

/// Largest residual of C n = 0 and of the normal-derivative equation for a
/// symbolic candidate.
double c_candidate_residual(const ImplicitSurface& s, const CCandidate& cand, const SurfacePoint& p);

struct ReductionResidual {
  double mixed = 0.0;   // max_a of the (a, n) block
  double normal = 0.0;  // the (n, n) entry
};

/// Index of the largest |n_i| at p.
int best_axis(const ImplicitSurface& s, const SurfacePoint& p);

/// Distance-gauge reduction: from a trial symmetric tangential block C_ab
/// ((n-1) x (n-1), coordinates other than `axis`) builds the remaining
/// entries of C from C n = 0 and the normal derivatives from the (a, b)
/// equations, then evaluates the (a, n) and (n, n) equations. Throws Error
/// if |n_axis| < 0.5 or the gauge is not distance-like (residual >= 1e-6).
ReductionResidual distance_reduction_check(const ImplicitSurface& s, const SurfacePoint& p, int axis,
                                           const Mat& trial_block);

struct DeResidual {
  double d_normal = 0.0;  // |n.D|
  double d_flow = 0.0;    // max_k |n.grad D_k - D.grad n_k|
  double e_flow = 0.0;    // |n.grad E|
};

/// Conditions on the D and E parts of a candidate. Missing parts report 0.
DeResidual de_conditions_residual(const ImplicitSurface& s, const CCandidate& cand, const SurfacePoint& p);

}  // namespace surfquant
