#pragma once

// Low-lying spectra of the two curve Hamiltonians on closed plane curves.
//
// The curve is traced, resampled on a uniform arclength grid s_j = j L / N,
// and -(hbar^2/2) d^2/ds^2 is discretized with periodic 3-point differences.
// The Dirac variant adds hbar^2 kappa(s)^2 / 8 on the diagonal.

#include <string>
#include <vector>

#include "surfquant/linalg.hpp"
#include "surfquant/surface.hpp"

namespace surfquant {

inline constexpr int kMinGrid = 16;
inline constexpr int kMaxGrid = 2048;

struct SpectrumResult {
  std::string label;
  int grid = 0;
  double hbar = 1.0;
  double length = 0.0;
  double step = 0.0;                // h = L / N
  std::vector<double> podolsky;     // ascending
  std::vector<double> dirac;        // ascending
  std::vector<double> gaps;         // dirac - podolsky per level
  std::vector<int> multiplicity;    // podolsky cluster size per level
};

struct CurveSampling {
  double length = 0.0;
  std::vector<double> curvature;  // at s_j, j = 0..N-1
};

/// Traces the curve through `start` and samples its curvature on the
/// uniform grid. `trace_step` bounds the tracing step.
CurveSampling sample_curve(const ImplicitSurface& s, const SurfacePoint& start, int grid, double trace_step = 1e-3);

/// Periodic second-difference Hamiltonian; `potential` is added on the
/// diagonal when non-empty.
Mat curve_hamiltonian(int grid, double step, double hbar, const std::vector<double>& potential);

/// Lowest `count` eigenvalues of both variants. Requires kMinGrid <= grid <=
/// kMaxGrid and count <= grid / 4.
SpectrumResult curve_spectrum(const ImplicitSurface& s, const SurfacePoint& start, int grid, int count,
                              double hbar = 1.0, double trace_step = 1e-3);

}  // namespace surfquant
