#include "surfquant/builtins.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "surfquant/linalg.hpp"

namespace surfquant {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return v < 0.0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

double param(const SurfaceSpec& spec, const std::string& key, double fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::string squares(int n) {
  std::string t;
  for (int i = 1; i <= n; ++i) t += (i > 1 ? "+x" : "x") + std::to_string(i) + "^2";
  return t;
}

Vec axis_point(int n, int axis, double value) {
  Vec x = Vec::Zero(n);
  x[axis] = value;
  return x;
}

int sphere_dim(const SurfaceSpec& spec, int fallback) {
  const double n = param(spec, "n", fallback);
  require(n == std::floor(n) && n >= 2 && n <= kMaxDim, "n must be an integer in [2, 8]");
  return static_cast<int>(n);
}

double positive(const SurfaceSpec& spec, const std::string& key, double fallback) {
  const double v = param(spec, key, fallback);
  require(std::isfinite(v) && v > 0.0, key + " must be positive");
  return v;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"sphere", "circle",   "ellipse", "ellipsoid",         "parabola",
                                              "paraboloid", "torus", "plane",  "cylinder-distance", "sphere-distance"};
  return names;
}

Builtin make_surface(const SurfaceSpec& spec) {
  const std::string& name = spec.name;
  std::string text;
  int dim = 0;
  Vec reference;
  std::optional<std::string> distance;
  std::optional<double> radius;

  if (name == "sphere" || name == "circle" || name == "sphere-distance") {
    dim = name == "circle" ? 2 : sphere_dim(spec, 3);
    const double r = positive(spec, "R", 1.0);
    distance = "sqrt(" + squares(dim) + ")-" + num(r);
    text = name == "sphere-distance" ? *distance : squares(dim) + "-" + num(r * r);
    reference = axis_point(dim, dim - 1, r);
    radius = r;
  } else if (name == "ellipse") {
    dim = 2;
    const double a = positive(spec, "a", 2.0), b = positive(spec, "b", 1.0);
    text = "x1^2/" + num(a * a) + "+x2^2/" + num(b * b) + "-1";
    reference = axis_point(2, 0, a);
  } else if (name == "ellipsoid") {
    dim = 3;
    const double a = positive(spec, "a", 2.0), b = positive(spec, "b", std::sqrt(2.0)), c = positive(spec, "c", 1.0);
    text = "x1^2/" + num(a * a) + "+x2^2/" + num(b * b) + "+x3^2/" + num(c * c) + "-1";
    reference = axis_point(3, 2, c);
  } else if (name == "parabola") {
    dim = 2;
    const double k = param(spec, "k", 1.0);
    require(std::isfinite(k), "k must be finite");
    text = "x2-" + num(0.5 * k) + "*x1^2";
    reference = Vec(2);
    reference << 1.0, 0.5 * k;
  } else if (name == "paraboloid") {
    std::vector<double> kappa = spec.kappa.empty() ? std::vector<double>{1.0, 1.0} : spec.kappa;
    dim = static_cast<int>(kappa.size()) + 1;
    require(dim >= 2 && dim <= kMaxDim, "paraboloid needs 1 to 7 curvatures");
    std::string quad;
    for (int a = 0; a < dim - 1; ++a) {
      const double k = kappa[static_cast<std::size_t>(a)];
      require(std::isfinite(k), "curvatures must be finite");
      if (k != 0.0) quad += (quad.empty() ? "" : "+") + num(0.5 * k) + "*x" + std::to_string(a + 1) + "^2";
    }
    text = (quad.empty() ? "" : quad) + "-x" + std::to_string(dim);
    reference = Vec::Zero(dim);
  } else if (name == "torus") {
    dim = 3;
    const double big = positive(spec, "R", 1.0), small = positive(spec, "r", 0.5);
    require(small < big, "torus needs r < R");
    text = "(x1^2+x2^2+x3^2+" + num(big * big - small * small) + ")^2-" + num(4.0 * big * big) + "*(x1^2+x2^2)";
    reference = axis_point(3, 0, big + small);
  } else if (name == "plane") {
    dim = 3;
    text = "x3";
    distance = text;
    reference = Vec::Zero(3);
  } else if (name == "cylinder-distance") {
    dim = 3;
    const double r = positive(spec, "R", 1.0);
    text = "sqrt(x1^2+x2^2)-" + num(r);
    distance = text;
    reference = axis_point(3, 0, r);
  } else if (name == "custom") {
    require(!spec.expression.empty(), "custom surface needs an expression");
    require(spec.dim >= 1 && spec.dim <= kMaxDim, "dimension must be in [1, 8]");
    dim = spec.dim;
    text = spec.expression;
    reference = Vec::Constant(dim, 0.5);
  } else {
    throw std::invalid_argument("unknown surface '" + name + "'");
  }

  Builtin b{spec, ImplicitSurface(parse(text, dim), name), reference, std::nullopt, radius};
  if (distance) b.distance = ImplicitSurface(parse(*distance, dim), name + "-distance");
  if (!spec.point.empty()) {
    require(static_cast<int>(spec.point.size()) == dim, "point has the wrong dimension");
    reference = Vec::Map(spec.point.data(), dim);
    b.reference = project_to_surface(b.surface, reference).x;
  } else if (name == "custom") {
    b.reference = project_to_surface(b.surface, reference).x;
  } else {
    b.reference = make_surface_point(b.surface, reference, 1e-9).x;
  }
  return b;
}

std::vector<SurfacePoint> sample_points(const Builtin& b, std::mt19937_64& rng, int count) {
  const ImplicitSurface& s = b.surface;
  const int n = s.dim();
  const std::string& name = b.spec.name;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SurfacePoint> out;

  auto direction = [&] {
    Vec x(n);
    do {
      for (int i = 0; i < n; ++i) x[i] = gauss(rng);
    } while (x.norm() < 1e-6);
    return Vec(x / x.norm());
  };

  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 50 * count + 50) throw Error("could not sample points on '" + s.label() + "'");
    Vec guess;
    if (name == "torus") {
      const double big = param(b.spec, "R", 1.0), small = param(b.spec, "r", 0.5);
      const double t = M_PI * unit(rng), p = M_PI * unit(rng);
      guess = Vec(3);
      guess << (big + small * std::cos(p)) * std::cos(t), (big + small * std::cos(p)) * std::sin(t),
          small * std::sin(p);
    } else if (name == "parabola" || name == "paraboloid" || name == "plane") {
      guess = Vec::Zero(n);
      for (int i = 0; i + 1 < n; ++i) guess[i] = 1.5 * unit(rng);
    } else if (name == "cylinder-distance") {
      const double r = param(b.spec, "R", 1.0), t = M_PI * unit(rng);
      guess = Vec(3);
      guess << r * std::cos(t), r * std::sin(t), unit(rng);
    } else if (name == "custom") {
      guess = b.reference;
      for (int i = 0; i < n; ++i) guess[i] += 0.5 * unit(rng);
    } else {
      guess = b.reference.norm() * direction();
    }
    try {
      SurfacePoint p = project_to_surface(s, guess);
      normal(s, p.x);
      out.push_back(p);
    } catch (const Error&) {
      // Projection failed or landed on a critical point; draw again.
    }
  }
  return out;
}

ImplicitSurface tangent_paraboloid(const ImplicitSurface& s, const SurfacePoint& p, std::string label) {
  const GeometryReport g = shape_and_curvatures(s, p);
  const Mat tangent = householder_complement(g.normal);
  const SymmetricEigen eig = jacobi_eigen(tangent.transpose() * g.shape * tangent);
  const auto n = g.normal.size();
  Mat frame(n, n);
  frame.leftCols(n - 1) = tangent * eig.vectors;
  frame.col(n - 1) = -g.normal;
  std::vector<double> kappa(eig.values.data(), eig.values.data() + eig.values.size());
  return paraboloid_gauge(kappa, frame, p.x, std::move(label));
}

GaugeFamily gauge_family(const Builtin& b) {
  GaugeFamily g;
  g.surface = b.surface.label();
  const bool is_distance = b.distance && b.distance->f().to_string() == b.surface.f().to_string();
  g.gauges.emplace_back(is_distance ? "distance" : "default", b.surface);
  if (b.distance && !is_distance) g.gauges.emplace_back("distance", *b.distance);
  if (b.surface.dim() >= 2)
    g.gauges.emplace_back("tangent-paraboloid",
                          tangent_paraboloid(b.surface, SurfacePoint{b.reference, 0.0}, "tangent-paraboloid"));
  return g;
}

}  // namespace surfquant
