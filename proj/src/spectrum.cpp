#include "surfquant/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace surfquant {

CurveSampling sample_curve(const ImplicitSurface& s, const SurfacePoint& start, int grid, double trace_step) {
  const CurveTrace trace = trace_curve(s, start, trace_step);
  CurveSampling out;
  out.length = trace.length;
  out.curvature.reserve(static_cast<std::size_t>(grid));

  // Linear interpolation in arclength; the closing segment wraps to s = L.
  std::vector<double> arc = trace.arclength, kappa = trace.curvature;
  arc.push_back(trace.length);
  kappa.push_back(trace.curvature.front());
  std::size_t seg = 0;
  for (int j = 0; j < grid; ++j) {
    const double sj = trace.length * j / grid;
    while (seg + 2 < arc.size() && arc[seg + 1] <= sj) ++seg;
    const double span = arc[seg + 1] - arc[seg];
    const double w = span > 0.0 ? (sj - arc[seg]) / span : 0.0;
    out.curvature.push_back((1.0 - w) * kappa[seg] + w * kappa[seg + 1]);
  }
  return out;
}

Mat curve_hamiltonian(int grid, double step, double hbar, const std::vector<double>& potential) {
  const double diag = hbar * hbar / (step * step);
  const double off = -0.5 * diag;
  Mat h = Mat::Zero(grid, grid);
  for (int j = 0; j < grid; ++j) {
    h(j, j) = diag + (potential.empty() ? 0.0 : potential[static_cast<std::size_t>(j)]);
    const int next = (j + 1) % grid;
    h(j, next) += off;
    h(next, j) += off;
  }
  if (h != h.transpose()) throw std::logic_error("curve Hamiltonian assembled non-symmetric");
  return h;
}

namespace {

std::vector<double> lowest(const Mat& h, int count) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NonConvergence("symmetric eigensolver failed");
  const Vec& values = solver.eigenvalues();
  if (values.minCoeff() < -1e-10) throw std::logic_error("negative eigenvalue in a nonnegative operator");
  return {values.data(), values.data() + count};
}

std::vector<int> clusters(const std::vector<double>& v) {
  std::vector<int> out(v.size(), 1);
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j] - v[i] <= 1e-8 * std::max(1.0, std::abs(v[i]))) ++j;
    for (std::size_t k = i; k < j; ++k) out[k] = static_cast<int>(j - i);
    i = j;
  }
  return out;
}

}  // namespace

SpectrumResult curve_spectrum(const ImplicitSurface& s, const SurfacePoint& start, int grid, int count, double hbar,
                              double trace_step) {
  if (grid < kMinGrid || grid > kMaxGrid) {
    std::ostringstream os;
    os << "grid size " << grid << " outside [" << kMinGrid << ", " << kMaxGrid << "]";
    throw std::invalid_argument(os.str());
  }
  if (count < 1 || count > grid / 4) throw std::invalid_argument("level count must be in [1, grid/4]");
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be positive");

  const CurveSampling sampling = sample_curve(s, start, grid, trace_step);
  SpectrumResult r;
  r.label = s.label();
  r.grid = grid;
  r.hbar = hbar;
  r.length = sampling.length;
  r.step = sampling.length / grid;

  std::vector<double> potential;
  for (double k : sampling.curvature) potential.push_back(hbar * hbar * k * k / 8.0);

  // Clusters come from the full spectrum so a truncated pair still counts as two.
  const std::vector<double> all = lowest(curve_hamiltonian(grid, r.step, hbar, {}), grid);
  r.podolsky.assign(all.begin(), all.begin() + count);
  r.dirac = lowest(curve_hamiltonian(grid, r.step, hbar, potential), count);
  for (int i = 0; i < count; ++i)
    r.gaps.push_back(r.dirac[static_cast<std::size_t>(i)] - r.podolsky[static_cast<std::size_t>(i)]);
  r.multiplicity = clusters(all);
  r.multiplicity.resize(static_cast<std::size_t>(count));
  return r;
}

}  // namespace surfquant
