#pragma once

// Implicit hypersurfaces f(x) = 0 in R^n and their extrinsic geometry.
//
// Sign convention: the unit normal is n = +grad f / |grad f| everywhere, and
// the shape operator is S = P (Hess f / |grad f|) P with P = I - n n^T, so the
// principal curvatures sum to div n. A "gauge" is one particular f for a
// fixed zero set; everything that depends on f only through n n^T is
// invariant under f -> -f.

#include <string>
#include <vector>

#include "surfquant/expr.hpp"
#include "surfquant/linalg.hpp"

namespace surfquant {

/// |grad f| at or below this is a hard error.
inline constexpr double kGradientFloor = 1e-8;

class ImplicitSurface {
 public:
  ImplicitSurface(Expr f, std::string label);

  int dim() const noexcept { return f_.dim(); }
  const Expr& f() const noexcept { return f_; }
  const std::string& label() const noexcept { return label_; }

  /// Symbolic d_i f.
  const std::vector<Expr>& gradient() const noexcept { return gradient_; }
  /// Symbolic |grad f|.
  const Expr& grad_norm() const noexcept { return grad_norm_; }
  /// Symbolic unit normal components n_i = d_i f / |grad f|. Every module
  /// reads the normal through these expressions.
  const std::vector<Expr>& normal() const noexcept { return normal_; }
  /// Symbolic projector entry delta_ij - n_i n_j.
  Expr projector(int i, int j) const;

 private:
  Expr f_;
  std::string label_;
  std::vector<Expr> gradient_;
  Expr grad_norm_;
  std::vector<Expr> normal_;
};

struct SurfacePoint {
  Vec x;
  double residual = 0.0;  // |f(x)|
};

/// Wraps a point already on the surface; throws if |f(x)| >= tolerance.
SurfacePoint make_surface_point(const ImplicitSurface& s, const Vec& x, double tolerance = 1e-10);

struct NormalData {
  Vec normal;
  double grad_norm = 0.0;
};

/// Unit normal and |grad f| at x. Throws DegenerateGradient when
/// |grad f| <= kGradientFloor.
NormalData normal(const ImplicitSurface& s, const Vec& x);

/// Jacobian of the normal field, J(i, k) = d_i n_k, from the symbolic normal.
Mat normal_jacobian(const ImplicitSurface& s, const Vec& x);

/// Newton iteration x <- x - f grad f / |grad f|^2 until |f| < 1e-12.
/// Throws NonConvergence (with the residual trace) after max_iterations.
SurfacePoint project_to_surface(const ImplicitSurface& s, const Vec& x0, int max_iterations = 50);

struct DistanceResiduals {
  double grad_norm_defect = 0.0;  // | |grad f| - 1 |
  double asymmetry = 0.0;         // max_ik |d_i n_k - d_k n_i|
  double flow = 0.0;              // max_i |sum_k n_k d_k n_i|

  double max() const noexcept;
  bool distance_like(double tolerance = 1e-9) const noexcept { return max() < tolerance; }
};

DistanceResiduals distance_gauge_residuals(const ImplicitSurface& s, const SurfacePoint& p);

struct GeometryReport {
  Vec x;
  Vec normal;
  double grad_norm = 0.0;
  Mat shape;
  Vec curvatures;  // n-1 values, ascending
  double div_n = 0.0;
  DistanceResiduals distance;
};

/// Shape operator, principal curvatures (Jacobi on the tangent block) and
/// div n computed from the symbolic normal. Throws Error if the two routes to
/// the mean curvature disagree by more than 1e-9.
GeometryReport shape_and_curvatures(const ImplicitSurface& s, const SurfacePoint& p);

/// Gauge f = 1/2 sum_a kappa_a y_a^2 - y_n in the frame coordinates
/// y = F^T (x - origin). The columns of `frame` are the axes; the last one
/// points toward the centre of curvature for positive kappa, so the zero set
/// is y_n = 1/2 sum kappa_a y_a^2 and the principal curvatures at the origin
/// are exactly kappa. Throws std::invalid_argument for a non-orthonormal
/// frame (tolerance 1e-12).
ImplicitSurface paraboloid_gauge(std::span<const double> kappa, const Mat& frame, const Vec& origin,
                                 std::string label = "paraboloid");

struct CurveTrace {
  std::vector<Vec> vertices;       // first vertex is the start point
  std::vector<double> arclength;   // cumulative, from 0
  std::vector<double> curvature;   // signed, under the global normal convention
  double length = 0.0;             // total length of the closed curve
};

/// Traces a closed plane curve (n = 2) by RK4 in arclength along the
/// tangent (-n2, n1) with a Newton corrector after every step. Throws
/// NonConvergence if the curve does not close within max_steps.
CurveTrace trace_curve(const ImplicitSurface& s, const SurfacePoint& start, double step,
                       int max_steps = 200000);

}  // namespace surfquant
