#pragma once

// Quantum potentials, Hamiltonians and the Laplace-Beltrami splitting.
//
// hbar is an explicit argument everywhere (default 1); potentials scale as
// hbar^2 and carry units of inverse length squared.

#include <string>
#include <utility>
#include <vector>

#include "surfquant/expr.hpp"
#include "surfquant/linalg.hpp"
#include "surfquant/surface.hpp"

namespace surfquant {

enum class PotentialMethod { general_formula, sphere_closed_form, paraboloid_closed_form, distance_curvature_form };

std::string to_string(PotentialMethod m);

struct PotentialReport {
  std::string surface;
  std::string gauge;
  Vec point;
  double value = 0.0;
  PotentialMethod method = PotentialMethod::general_formula;
};

/// V_q = -(hbar^2/8) sum_i w_i^2 + (hbar^2/4) sum_i (d_i - n_i n.grad) w_i with
/// w_i = sum_j d_j(n_i n_j), evaluated from the order-3 jet of f.
PotentialReport quantum_potential_general(const ImplicitSurface& s, const SurfacePoint& p, double hbar = 1.0);

/// hbar^2 (n-1)^2 / (8 R^2).
double quantum_potential_sphere(int n, double radius, double hbar = 1.0);

/// (hbar^2/8) ((sum k)^2 + 2 sum k^2).
double quantum_potential_paraboloid(std::span<const double> kappa, double hbar = 1.0);

/// (hbar^2/8) (sum of principal curvatures)^2. Uses only the geometry.
double quantum_potential_distance(const ImplicitSurface& s, const SurfacePoint& p, double hbar = 1.0);

/// Surface Laplacian of u at p, Lap u - n^T Hess(u) n - (div n)(n.grad u).
/// Independent of the gauge.
double laplace_beltrami(const ImplicitSurface& s, const Expr& u, const SurfacePoint& p);

struct LbResult {
  double value = 0.0;
  DistanceResiduals residuals;
  /// Set when the gauge is not distance-like at p (residual >= 1e-6); the
  /// value then contains the gauge drift.
  bool warning = false;
};

/// Lap u - (d_n)^2 u - (div n) d_n u with (d_n)^2 u = n^T Hess(u) n + (D n).grad u
/// and D = n.grad.
LbResult lb_apply(const ImplicitSurface& s, const Expr& u, const SurfacePoint& p);

/// First-order coefficients of (Lap - (d_n)^2 - div n d_n) - Lap_LB. Zero in
/// any gauge whose normal field is geodesic.
Vec drift_term(const ImplicitSurface& s, const SurfacePoint& p);

struct GaugeFamily {
  std::string surface;
  std::vector<std::pair<std::string, ImplicitSurface>> gauges;
};

struct AmbiguityReport {
  std::string surface;
  Vec point;
  std::vector<PotentialReport> rows;
  double recommended = 0.0;  // distance-curvature value
  double spread = 0.0;       // max - min over the gauges
  bool ambiguous = false;    // spread > 1e-6
};

/// General V_q in every gauge at the shared point p. Throws Error if some
/// gauge does not contain p (|f| >= 1e-9).
AmbiguityReport ambiguity_report(const GaugeFamily& g, const Vec& p, double hbar = 1.0);

enum class HamiltonianVariant { podolsky, dirac };

/// Podolsky: -(hbar^2/2)(Lap - (d_n)^2 - div n d_n) u. Dirac adds V_q u.
/// Both are cross-checked against the operator products sum p_i^dagger p_i
/// and sum p~_i p~_i; a disagreement above 1e-9 throws Error.
double hamiltonian_apply(const ImplicitSurface& s, HamiltonianVariant variant, const Expr& u,
                         const SurfacePoint& p, double hbar = 1.0);

}  // namespace surfquant
