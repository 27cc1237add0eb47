#pragma once

// Named surfaces with their parameters, reference points and gauges.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "surfquant/quantization.hpp"
#include "surfquant/surface.hpp"

namespace surfquant {

struct SurfaceSpec {
  std::string name;                       // builtin name, or "custom"
  std::map<std::string, double> params;   // n, R, r, a, b, c, k
  std::vector<double> kappa;              // paraboloid curvatures
  std::string expression;                 // custom only
  int dim = 0;                            // custom only
  std::vector<double> point;              // optional start point, projected
};

/// Names accepted by make_surface, in display order.
const std::vector<std::string>& builtin_names();

/// A surface instance with everything the reports need.
struct Builtin {
  SurfaceSpec spec;
  ImplicitSurface surface;
  Vec reference;                          // a point on the zero set
  std::optional<ImplicitSurface> distance;  // closed-form distance gauge
  std::optional<double> sphere_radius;      // set for spheres and circles
};

/// Builds a builtin or custom surface. Missing parameters take defaults;
/// unknown names or invalid values throw std::invalid_argument. Parameters
/// are printed into the expression text with 17 significant digits.
Builtin make_surface(const SurfaceSpec& spec);

/// `count` seeded points on the surface, deterministic for a given rng state.
std::vector<SurfacePoint> sample_points(const Builtin& b, std::mt19937_64& rng, int count);

/// Osculating paraboloid gauge at p: principal axes from the shape
/// operator, last axis pointing toward the centres of curvature.
ImplicitSurface tangent_paraboloid(const ImplicitSurface& s, const SurfacePoint& p, std::string label);

/// Default gauge, closed-form distance gauge when known, and the tangent
/// paraboloid at the reference point.
GaugeFamily gauge_family(const Builtin& b);

}  // namespace surfquant
