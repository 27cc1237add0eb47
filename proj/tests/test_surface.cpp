#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "surfquant/surface.hpp"

using namespace surfquant;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

ImplicitSurface unit_sphere() { return ImplicitSurface(parse("x1^2+x2^2+x3^2-1", 3), "sphere"); }

}  // namespace

TEST_CASE("normal of the unit circle") {
  ImplicitSurface c(parse("x1^2+x2^2-1", 2), "circle");
  NormalData nd = normal(c, vec({0.6, 0.8}));
  CHECK(nd.normal[0] == doctest::Approx(0.6));
  CHECK(nd.normal[1] == doctest::Approx(0.8));
  CHECK(nd.grad_norm == doctest::Approx(2.0));
}

TEST_CASE("degenerate gradient is a hard error") {
  ImplicitSurface c(parse("x1^2+x2^2-1", 2), "circle");
  try {
    normal(c, vec({0.0, 0.0}));
    FAIL("expected DegenerateGradient");
  } catch (const DegenerateGradient& e) {
    CHECK(e.grad_norm() == 0.0);
  }
}

TEST_CASE("make_surface_point rejects off-surface points") {
  ImplicitSurface s = unit_sphere();
  CHECK_NOTHROW(make_surface_point(s, vec({0.0, 0.0, 1.0})));
  CHECK_THROWS_AS(make_surface_point(s, vec({0.0, 0.0, 1.1})), Error);
}

TEST_CASE("projection converges quadratically onto the sphere") {
  ImplicitSurface s = unit_sphere();
  SurfacePoint p = project_to_surface(s, vec({0.3, -0.4, 1.5}));
  CHECK(p.residual < 1e-12);
  CHECK(p.x.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(project_to_surface(s, vec({0.0, 0.0, 0.0})), DegenerateGradient);
}

TEST_CASE("projection reports non-convergence with a trace") {
  // x1^2 + 1 has no real zeros; Newton wanders.
  ImplicitSurface s(parse("x1^2+x2^2+1", 2), "empty");
  try {
    project_to_surface(s, vec({0.7, 0.2}), 20);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.trace().size() == 21);
  } catch (const DegenerateGradient&) {
    // Landing exactly on the critical point is also acceptable.
  }
}

TEST_CASE("unit sphere curvatures in two gauges") {
  ImplicitSurface s = unit_sphere();
  SurfacePoint pole = make_surface_point(s, vec({0.0, 0.0, 1.0}));
  GeometryReport r = shape_and_curvatures(s, pole);
  CHECK(r.curvatures[0] == doctest::Approx(1.0));
  CHECK(r.curvatures[1] == doctest::Approx(1.0));
  CHECK(r.div_n == doctest::Approx(2.0));

  ImplicitSurface d(parse("sqrt(x1^2+x2^2+x3^2)-1", 3), "sphere-distance");
  GeometryReport rd = shape_and_curvatures(d, pole);
  CHECK(rd.curvatures[0] == doctest::Approx(1.0));
  CHECK(rd.distance.distance_like());
  CHECK_FALSE(r.distance.distance_like());
}

TEST_CASE("curvatures are gauge invariant up to sign") {
  ImplicitSurface a(parse("x1^2/4+x2^2+x3^2/9-1", 3), "ellipsoid");
  ImplicitSurface b(parse("-3*(x1^2/4+x2^2+x3^2/9-1)", 3), "ellipsoid-negated");
  ImplicitSurface c(parse("exp(x1^2/4+x2^2+x3^2/9-1)-1", 3), "ellipsoid-exp");
  SurfacePoint p = project_to_surface(a, vec({1.0, 0.5, 1.0}));
  Vec ka = shape_and_curvatures(a, p).curvatures;
  Vec kb = shape_and_curvatures(b, p).curvatures;
  Vec kc = shape_and_curvatures(c, p).curvatures;
  for (int i = 0; i < 2; ++i) {
    CHECK(kc[i] == doctest::Approx(ka[i]).epsilon(1e-10));
    CHECK(-kb[1 - i] == doctest::Approx(ka[i]).epsilon(1e-10));
  }
}

TEST_CASE("distance gauge residuals") {
  ImplicitSurface plane(parse("x3", 3), "plane");
  SurfacePoint p = make_surface_point(plane, vec({0.3, 0.1, 0.0}));
  DistanceResiduals r = distance_gauge_residuals(plane, p);
  CHECK(r.max() == 0.0);

  ImplicitSurface cyl(parse("sqrt(x1^2+x2^2)-1", 3), "cylinder-distance");
  SurfacePoint q = make_surface_point(cyl, vec({0.6, 0.8, 2.0}));
  CHECK(distance_gauge_residuals(cyl, q).max() < 1e-12);

  ImplicitSurface parab(parse("x2-x1^2", 2), "parabola");
  SurfacePoint o = make_surface_point(parab, vec({1.0, 1.0}));
  CHECK_FALSE(distance_gauge_residuals(parab, o).distance_like());
}

TEST_CASE("paraboloid gauge reproduces its curvatures") {
  const double kappa[] = {0.5, -2.0};
  Mat frame = Mat::Identity(3, 3);
  ImplicitSurface s = paraboloid_gauge(kappa, frame, vec({1.0, 2.0, 3.0}));
  GeometryReport r = shape_and_curvatures(s, make_surface_point(s, vec({1.0, 2.0, 3.0})));
  CHECK(r.curvatures[0] == doctest::Approx(-2.0));
  CHECK(r.curvatures[1] == doctest::Approx(0.5));
  CHECK(r.normal[2] == doctest::Approx(-1.0));

  // Tangent paraboloid of the unit sphere at the north pole.
  Mat f(3, 3);
  f << 1, 0, 0, 0, 1, 0, 0, 0, -1;
  const double ones[] = {1.0, 1.0};
  ImplicitSurface t = paraboloid_gauge(ones, f, vec({0.0, 0.0, 1.0}));
  GeometryReport rt = shape_and_curvatures(t, make_surface_point(t, vec({0.0, 0.0, 1.0})));
  CHECK(rt.curvatures[0] == doctest::Approx(1.0));
  CHECK(rt.curvatures[1] == doctest::Approx(1.0));
  CHECK(rt.normal[2] == doctest::Approx(1.0));

  Mat bad = Mat::Identity(3, 3);
  bad(0, 1) = 1e-6;
  CHECK_THROWS_AS(paraboloid_gauge(kappa, bad, vec({0.0, 0.0, 0.0})), std::invalid_argument);
}

TEST_CASE("property: shape operator annihilates the normal and is symmetric") {
  std::mt19937_64 rng(3);
  ImplicitSurface torus(parse("(x1^2+x2^2+x3^2+0.75)^2-4*(x1^2+x2^2)", 3), "torus");
  for (int trial = 0; trial < 20; ++trial) {
    Vec x = oracle::unit_direction(rng, 3) * 1.2;
    SurfacePoint p = project_to_surface(torus, x);
    GeometryReport r = shape_and_curvatures(torus, p);
    CHECK((r.shape * r.normal).norm() < 1e-12);
    CHECK(max_abs(r.shape - r.shape.transpose()) == 0.0);
    CHECK(r.curvatures.sum() == doctest::Approx(r.div_n).epsilon(1e-9));
  }
}

TEST_CASE("ellipse perimeter from curve tracing") {
  ImplicitSurface e(parse("x1^2/4+x2^2-1", 2), "ellipse");
  SurfacePoint start = make_surface_point(e, vec({2.0, 0.0}));
  CurveTrace t = trace_curve(e, start, 1e-3);
  CHECK(t.length == doctest::Approx(9.688448220547675).epsilon(1e-9));
  CHECK(t.curvature.front() == doctest::Approx(2.0));  // a / b^2 at the vertex

  ImplicitSurface c(parse("x1^2+x2^2-1", 2), "circle");
  CurveTrace tc = trace_curve(c, make_surface_point(c, vec({1.0, 0.0})), 0.01);
  CHECK(tc.length == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
  for (double k : tc.curvature) CHECK(k == doctest::Approx(1.0));
}
