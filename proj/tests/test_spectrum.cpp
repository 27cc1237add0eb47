#include <cmath>

#include "doctest.h"
#include "surfquant/spectrum.hpp"

using namespace surfquant;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

// Exact eigenvalue of the periodic 3-point operator for wavenumber m.
double discrete_level(int m, double h) { return (1.0 - std::cos(m * h)) / (h * h); }

}  // namespace

TEST_CASE("circle spectrum matches the discrete analytic levels") {
  ImplicitSurface c(parse("x1^2+x2^2-1", 2), "circle");
  SpectrumResult r = curve_spectrum(c, make_surface_point(c, vec({1.0, 0.0})), 128, 9);
  CHECK(r.length == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
  const int wave[] = {0, 1, 1, 2, 2, 3, 3, 4, 4};
  for (int i = 0; i < 9; ++i) {
    CHECK(r.podolsky[static_cast<std::size_t>(i)] == doctest::Approx(discrete_level(wave[i], r.step)).epsilon(1e-9));
    CHECK(std::abs(r.gaps[static_cast<std::size_t>(i)] - 0.125) < 1e-9);
  }
  CHECK(r.multiplicity[0] == 1);
  for (int i = 1; i < 9; ++i) CHECK(r.multiplicity[static_cast<std::size_t>(i)] == 2);
  for (double v : r.podolsky) CHECK(v >= -1e-10);
}

TEST_CASE("circle of radius 2 and hbar scaling") {
  ImplicitSurface c(parse("x1^2+x2^2-4", 2), "circle");
  SpectrumResult r = curve_spectrum(c, make_surface_point(c, vec({0.0, 2.0})), 64, 4, 0.5);
  // gap hbar^2 kappa^2 / 8
  for (double g : r.gaps) CHECK(std::abs(g - 0.25 * 0.25 / 8.0) < 1e-9);
}

TEST_CASE("ellipse gap follows first-order perturbation theory") {
  ImplicitSurface e(parse("x1^2/4+x2^2-1", 2), "ellipse");
  const SurfacePoint start = make_surface_point(e, vec({2.0, 0.0}));
  SpectrumResult r = curve_spectrum(e, start, 256, 4);
  CurveSampling samp = sample_curve(e, start, 256);
  double mean = 0.0;
  for (double k : samp.curvature) mean += k * k / 8.0;
  mean /= static_cast<double>(samp.curvature.size());
  CHECK(r.dirac[0] > r.podolsky[0]);
  CHECK(std::abs(r.gaps[0] - mean) < 0.2 * mean);
  CHECK(r.length == doctest::Approx(9.688448220547675).epsilon(1e-9));
}

TEST_CASE("argument validation") {
  ImplicitSurface c(parse("x1^2+x2^2-1", 2), "circle");
  const SurfacePoint p = make_surface_point(c, vec({1.0, 0.0}));
  CHECK_THROWS_AS(curve_spectrum(c, p, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(curve_spectrum(c, p, 4096, 1), std::invalid_argument);
  CHECK_THROWS_AS(curve_spectrum(c, p, 64, 17), std::invalid_argument);
  ImplicitSurface s(parse("x1^2+x2^2+x3^2-1", 3), "sphere");
  CHECK_THROWS_AS(curve_spectrum(s, make_surface_point(s, vec({1, 0, 0})), 64, 4), std::invalid_argument);
}

TEST_CASE("Hamiltonian matrix is symmetric with periodic corners") {
  Mat h = curve_hamiltonian(16, 0.5, 1.0, {});
  CHECK(h == h.transpose());
  CHECK(h(0, 15) == -2.0);
  CHECK(h(0, 0) == 4.0);
}
