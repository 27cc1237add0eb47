#include "surfquant/conversion.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "surfquant/jet.hpp"

namespace surfquant {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::solvable: return "SOLVABLE";
    case Verdict::obstructed: return "OBSTRUCTED";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

namespace {

constexpr double kRankThreshold = 1e-9;
constexpr double kAmbiguousBand = 1e-6;
constexpr double kNeighbourStep = 1e-2;

Mat projector_at(const Vec& nv) { return Mat::Identity(nv.size(), nv.size()) - nv * nv.transpose(); }

// Position of the symmetric pair (l, k) among the n(n+1)/2 upper entries.
int pair_index(int n, int l, int k) {
  if (l > k) std::swap(l, k);
  return l * n - l * (l - 1) / 2 + (k - l);
}

struct CoreResult {
  Verdict verdict = Verdict::inconclusive;
  int unknowns = 0;
  int rank = 0;
  Vec singular;
  double residual = 0.0;
};

CoreResult analyse(const ImplicitSurface& s, const Vec& x) {
  const int n = s.dim();
  const int m = n * (n + 1) / 2;
  const Vec nv = normal(s, x).normal;
  const Mat jac = normal_jacobian(s, x);
  const Vec dn = jac.transpose() * nv;

  Mat sys = Mat::Zero(2 * n + m, 2 * m);
  int row = 0;
  for (int k = 0; k < n; ++k, ++row)
    for (int i = 0; i < n; ++i) sys(row, pair_index(n, i, k)) += nv[i];
  for (int k = 0; k < n; ++k, ++row)
    for (int i = 0; i < n; ++i) {
      sys(row, pair_index(n, i, k)) += dn[i];
      sys(row, m + pair_index(n, i, k)) += nv[i];
    }
  for (int l = 0; l < n; ++l)
    for (int k = l; k < n; ++k, ++row) {
      sys(row, m + pair_index(n, l, k)) += 1.0;
      for (int i = 0; i < n; ++i) {
        sys(row, pair_index(n, l, i)) -= jac(i, k);
        sys(row, pair_index(n, k, i)) -= jac(i, l);
      }
    }

  Eigen::JacobiSVD<Mat> svd(sys, Eigen::ComputeFullV);
  CoreResult out;
  out.unknowns = 2 * m;
  out.singular = svd.singularValues();
  const double top = out.singular.size() > 0 ? out.singular[0] : 0.0;
  bool ambiguous = false;
  for (Eigen::Index i = 0; i < out.singular.size(); ++i) {
    const double rel = top > 0.0 ? out.singular[i] / top : 0.0;
    if (rel > kRankThreshold) ++out.rank;
    if (rel >= kRankThreshold && rel <= kAmbiguousBand) ambiguous = true;
  }
  out.residual = top > 0.0 ? out.singular[out.singular.size() - 1] / top : 0.0;

  // Tangent blocks E^T C E spanned by the null space.
  const Mat tangent = householder_complement(nv);
  const Mat& v = svd.matrixV();
  double block = 0.0;
  for (Eigen::Index col = out.rank; col < v.cols(); ++col) {
    Mat c(n, n);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k) c(l, k) = v(pair_index(n, l, k), col);
    block = std::max(block, max_abs(tangent.transpose() * c * tangent));
  }
  if (ambiguous)
    out.verdict = Verdict::inconclusive;
  else
    out.verdict = block > 1e-8 ? Verdict::solvable : Verdict::obstructed;
  return out;
}

}  // namespace

Proportionality proportionality_residual(const ImplicitSurface& s, const SurfacePoint& p) {
  const int n = s.dim();
  const Vec nv = normal(s, p.x).normal;
  const Mat jac = normal_jacobian(s, p.x);
  const Mat tangent = householder_complement(nv);
  Proportionality r;
  r.factor = n > 1 ? (tangent.transpose() * jac * tangent).trace() / (n - 1) : 0.0;
  r.residual = max_abs(jac - r.factor * projector_at(nv));
  return r;
}

double g_equation_residual(const ImplicitSurface& s, const Expr& g, const SurfacePoint& p) {
  const int n = s.dim();
  const Vec nv = normal(s, p.x).normal;
  const Mat jac = normal_jacobian(s, p.x);
  const Jet3 jg = eval_jet(g, as_span(p.x), 1);
  double along = 0.0;
  for (int i = 0; i < n; ++i) along += nv[i] * jg.grad(i);
  return max_abs(along * projector_at(nv) - 2.0 * jg.value() * jac);
}

ConversionDiagnosis c_system_analysis(const ImplicitSurface& s, const SurfacePoint& p) {
  const CoreResult core = analyse(s, p.x);
  ConversionDiagnosis d;
  d.surface = s.label();
  d.point = p.x;
  d.check = "c-system";
  d.residual = core.residual;
  d.unknowns = core.unknowns;
  d.rank = core.rank;
  d.singular_values = core.singular;
  d.verdict = core.verdict;
  if (d.verdict == Verdict::inconclusive) return d;

  // The pointwise verdict must be stable under small moves along the surface.
  const Mat tangent = householder_complement(normal(s, p.x).normal);
  for (Eigen::Index a = 0; a < tangent.cols(); ++a)
    for (double sign : {-1.0, 1.0}) {
      Vec y;
      try {
        y = project_to_surface(s, p.x + sign * kNeighbourStep * tangent.col(a)).x;
      } catch (const Error&) {
        continue;
      }
      if (analyse(s, y).verdict != core.verdict) {
        d.verdict = Verdict::inconclusive;
        return d;
      }
    }
  return d;
}

double c_candidate_residual(const ImplicitSurface& s, const CCandidate& cand, const SurfacePoint& p) {
  const int n = s.dim();
  if (static_cast<int>(cand.c.size()) != n) throw std::invalid_argument("candidate C has the wrong size");
  const Vec nv = normal(s, p.x).normal;
  const Mat jac = normal_jacobian(s, p.x);
  Mat c(n, n), dc(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      const Jet3 j = eval_jet(cand.c[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)], as_span(p.x), 1);
      c(l, k) = j.value();
      double along = 0.0;
      for (int i = 0; i < n; ++i) along += nv[i] * j.grad(i);
      dc(l, k) = along;
    }
  const Mat cj = c * jac;
  const double first = (c * nv).cwiseAbs().maxCoeff();
  const double second = max_abs(dc - cj - cj.transpose());
  return std::max(first, second);
}

int best_axis(const ImplicitSurface& s, const SurfacePoint& p) {
  Eigen::Index axis = 0;
  normal(s, p.x).normal.cwiseAbs().maxCoeff(&axis);
  return static_cast<int>(axis);
}

ReductionResidual distance_reduction_check(const ImplicitSurface& s, const SurfacePoint& p, int axis,
                                           const Mat& trial_block) {
  const int n = s.dim();
  if (n < 2) throw std::invalid_argument("distance_reduction_check needs n >= 2");
  if (axis < 0 || axis >= n) throw std::invalid_argument("distance_reduction_check: axis out of range");
  if (trial_block.rows() != n - 1 || trial_block.cols() != n - 1)
    throw std::invalid_argument("distance_reduction_check: trial block must be (n-1) x (n-1)");

  const DistanceResiduals dist = distance_gauge_residuals(s, p);
  if (!dist.distance_like(1e-6)) {
    std::ostringstream os;
    os << "gauge of '" << s.label() << "' is not distance-like at this point (residual " << dist.max() << ")";
    throw Error(os.str());
  }
  const Vec nv = normal(s, p.x).normal;
  const double nn = nv[axis];
  if (std::abs(nn) < 0.5) {
    std::ostringstream os;
    os << "axis " << axis + 1 << " is a poor choice: |n| component " << std::abs(nn) << " < 0.5; use axis "
       << best_axis(s, p) + 1;
    throw Error(os.str());
  }
  const Mat jac = normal_jacobian(s, p.x);

  std::vector<int> tang;
  for (int i = 0; i < n; ++i)
    if (i != axis) tang.push_back(i);
  const auto t = [&](int a) { return tang[static_cast<std::size_t>(a)]; };
  const int r = static_cast<int>(tang.size());

  // Full C from the tangential block and C n = 0.
  Mat c = Mat::Zero(n, n);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) c(t(a), t(b)) = 0.5 * (trial_block(a, b) + trial_block(b, a));
  for (int a = 0; a < r; ++a) {
    double acc = 0.0;
    for (int b = 0; b < r; ++b) acc += nv[t(b)] * c(t(a), t(b));
    c(t(a), axis) = c(axis, t(a)) = -acc / nn;
  }
  double cnn = 0.0;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) cnn += nv[t(a)] * nv[t(b)] * c(t(a), t(b));
  c(axis, axis) = cnn / (nn * nn);

  const Mat cj = c * jac;
  const Mat rhs = cj + cj.transpose();

  // Normal derivatives: the (a, b) block from the equations themselves, the
  // rest from differentiating C n = 0 along n (D n = 0 in this gauge).
  Mat dc = Mat::Zero(n, n);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) dc(t(a), t(b)) = rhs(t(a), t(b));
  for (int a = 0; a < r; ++a) {
    double acc = 0.0;
    for (int b = 0; b < r; ++b) acc += nv[t(b)] * dc(t(a), t(b));
    dc(t(a), axis) = dc(axis, t(a)) = -acc / nn;
  }
  double dnn = 0.0;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) dnn += nv[t(a)] * nv[t(b)] * dc(t(a), t(b));
  dc(axis, axis) = dnn / (nn * nn);

  const Mat residual = dc - rhs;
  ReductionResidual out;
  for (int a = 0; a < r; ++a) out.mixed = std::max(out.mixed, std::abs(residual(t(a), axis)));
  out.normal = std::abs(residual(axis, axis));
  return out;
}

DeResidual de_conditions_residual(const ImplicitSurface& s, const CCandidate& cand, const SurfacePoint& p) {
  const int n = s.dim();
  const Vec nv = normal(s, p.x).normal;
  DeResidual out;
  if (cand.d) {
    if (static_cast<int>(cand.d->size()) != n) throw std::invalid_argument("candidate D has the wrong size");
    const Mat jac = normal_jacobian(s, p.x);
    Vec dv(n);
    Mat grad(n, n);  // grad(i, k) = d_i D_k
    for (int k = 0; k < n; ++k) {
      const Jet3 j = eval_jet((*cand.d)[static_cast<std::size_t>(k)], as_span(p.x), 1);
      dv[k] = j.value();
      for (int i = 0; i < n; ++i) grad(i, k) = j.grad(i);
    }
    out.d_normal = std::abs(nv.dot(dv));
    out.d_flow = (grad.transpose() * nv - jac.transpose() * dv).cwiseAbs().maxCoeff();
  }
  if (cand.e) {
    const Jet3 j = eval_jet(*cand.e, as_span(p.x), 1);
    double along = 0.0;
    for (int i = 0; i < n; ++i) along += nv[i] * j.grad(i);
    out.e_flow = std::abs(along);
  }
  return out;
}

}  // namespace surfquant
