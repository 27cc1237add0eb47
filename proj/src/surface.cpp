#include "surfquant/surface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "surfquant/jet.hpp"

namespace surfquant {

ImplicitSurface::ImplicitSurface(Expr f, std::string label)
    : f_(std::move(f)), label_(std::move(label)), grad_norm_(Expr::constant(f_.dim(), 0.0)) {
  const int n = f_.dim();
  Differentiator d;
  std::vector<Expr> squares;
  for (int i = 0; i < n; ++i) {
    gradient_.push_back(d(f_, i));
    squares.push_back(pow(gradient_.back(), 2));
  }
  grad_norm_ = sqrt(sum(squares));
  for (int i = 0; i < n; ++i) normal_.push_back(gradient_[static_cast<std::size_t>(i)] / grad_norm_);
}

Expr ImplicitSurface::projector(int i, int j) const {
  const auto& n = normal_;
  Expr nn = n[static_cast<std::size_t>(i)] * n[static_cast<std::size_t>(j)];
  return i == j ? 1.0 - nn : -nn;
}

SurfacePoint make_surface_point(const ImplicitSurface& s, const Vec& x, double tolerance) {
  if (x.size() != s.dim()) throw std::invalid_argument("point dimension mismatch");
  const double r = std::abs(s.f()(as_span(x)));
  if (!(r < tolerance)) {
    std::ostringstream os;
    os << "point is not on surface '" << s.label() << "': |f| = " << r;
    throw Error(os.str());
  }
  return {x, r};
}

NormalData normal(const ImplicitSurface& s, const Vec& x) {
  if (x.size() != s.dim()) throw std::invalid_argument("point dimension mismatch");
  const double g = s.grad_norm()(as_span(x));
  if (!(g > kGradientFloor)) {
    std::ostringstream os;
    os << "degenerate gradient on '" << s.label() << "': |grad f| = " << g;
    throw DegenerateGradient(os.str(), g);
  }
  NormalData out{Vec(s.dim()), g};
  for (int i = 0; i < s.dim(); ++i) out.normal[i] = s.normal()[static_cast<std::size_t>(i)](as_span(x));
  return out;
}

Mat normal_jacobian(const ImplicitSurface& s, const Vec& x) {
  normal(s, x);  // gradient check
  const int n = s.dim();
  Mat j(n, n);
  for (int k = 0; k < n; ++k) {
    Jet3 nk = eval_jet(s.normal()[static_cast<std::size_t>(k)], as_span(x), 1);
    for (int i = 0; i < n; ++i) j(i, k) = nk.grad(i);
  }
  return j;
}

SurfacePoint project_to_surface(const ImplicitSurface& s, const Vec& x0, int max_iterations) {
  if (x0.size() != s.dim()) throw std::invalid_argument("point dimension mismatch");
  constexpr double kTarget = 1e-12;
  Vec x = x0;
  std::vector<double> trace;
  for (int it = 0; it <= max_iterations; ++it) {
    Jet3 jf = eval_jet(s.f(), as_span(x), 1);
    const double r = std::abs(jf.value());
    trace.push_back(r);
    if (r < kTarget) return {x, r};
    if (it == max_iterations) break;
    Vec g(s.dim());
    for (int i = 0; i < s.dim(); ++i) g[i] = jf.grad(i);
    const double g2 = g.squaredNorm();
    if (!(std::sqrt(g2) > kGradientFloor))
      throw DegenerateGradient("degenerate gradient during projection onto '" + s.label() + "'", std::sqrt(g2));
    x -= (jf.value() / g2) * g;
  }
  throw NonConvergence("projection onto '" + s.label() + "' did not converge", std::move(trace));
}

double DistanceResiduals::max() const noexcept { return std::max({grad_norm_defect, asymmetry, flow}); }

DistanceResiduals distance_gauge_residuals(const ImplicitSurface& s, const SurfacePoint& p) {
  const NormalData nd = normal(s, p.x);
  const Mat j = normal_jacobian(s, p.x);
  DistanceResiduals r;
  r.grad_norm_defect = std::abs(nd.grad_norm - 1.0);
  r.asymmetry = max_abs(j - j.transpose());
  // (J^T n)_i = sum_k n_k d_k n_i
  r.flow = (j.transpose() * nd.normal).cwiseAbs().maxCoeff();
  return r;
}

GeometryReport shape_and_curvatures(const ImplicitSurface& s, const SurfacePoint& p) {
  const int n = s.dim();
  if (n < 2) throw std::invalid_argument("shape operator needs n >= 2");
  const NormalData nd = normal(s, p.x);
  const Jet3 jf = eval_jet(s.f(), as_span(p.x), 2);

  Mat hess(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) hess(i, k) = jf.hess(i, k);
  const Mat proj = Mat::Identity(n, n) - nd.normal * nd.normal.transpose();
  Mat shape = proj * (hess / nd.grad_norm) * proj;
  shape = 0.5 * (shape + shape.transpose()).eval();

  const Mat tangent = householder_complement(nd.normal);
  const Mat block = tangent.transpose() * shape * tangent;
  const SymmetricEigen eig = jacobi_eigen(block);

  const Mat jac = normal_jacobian(s, p.x);

  GeometryReport out;
  out.x = p.x;
  out.normal = nd.normal;
  out.grad_norm = nd.grad_norm;
  out.shape = shape;
  out.curvatures = eig.values;
  out.div_n = jac.trace();
  out.distance.grad_norm_defect = std::abs(nd.grad_norm - 1.0);
  out.distance.asymmetry = max_abs(jac - jac.transpose());
  out.distance.flow = (jac.transpose() * nd.normal).cwiseAbs().maxCoeff();

  const double mismatch = std::abs(eig.values.sum() - out.div_n);
  if (mismatch > 1e-9 * std::max(1.0, std::abs(out.div_n))) {
    std::ostringstream os;
    os << "sum of principal curvatures differs from div n by " << mismatch << " on '" << s.label() << "'";
    throw Error(os.str());
  }
  return out;
}

ImplicitSurface paraboloid_gauge(std::span<const double> kappa, const Mat& frame, const Vec& origin,
                                 std::string label) {
  const auto n = frame.rows();
  if (frame.cols() != n || origin.size() != n || static_cast<Eigen::Index>(kappa.size()) != n - 1)
    throw std::invalid_argument("paraboloid_gauge: inconsistent dimensions");
  if (max_abs(frame.transpose() * frame - Mat::Identity(n, n)) > 1e-12)
    throw std::invalid_argument("paraboloid_gauge: frame is not orthonormal");

  const int dim = static_cast<int>(n);
  auto frame_coordinate = [&](Eigen::Index axis) {
    std::vector<Expr> terms;
    double shift = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      shift += frame(i, axis) * origin[i];
      if (frame(i, axis) != 0.0) terms.push_back(frame(i, axis) * Expr::variable(dim, static_cast<int>(i)));
    }
    return sum(terms) - shift;
  };

  Expr f = -frame_coordinate(n - 1);
  for (Eigen::Index a = 0; a + 1 < n; ++a) {
    const double k = kappa[static_cast<std::size_t>(a)];
    if (k != 0.0) f = f + (0.5 * k) * pow(frame_coordinate(a), 2);
  }
  return ImplicitSurface(f, std::move(label));
}

namespace {

Vec tangent_2d(const ImplicitSurface& s, const Vec& x) {
  const Vec nv = normal(s, x).normal;
  Vec t(2);
  t << -nv[1], nv[0];
  return t;
}

double plane_curvature(const ImplicitSurface& s, const Vec& x) {
  return shape_and_curvatures(s, SurfacePoint{x, 0.0}).curvatures[0];
}

// Arc length of a circular arc with chord c and curvature k.
double arc_from_chord(double c, double k) {
  const double z = 0.5 * std::abs(k) * c;
  if (z < 1e-4) return c * (1.0 + z * z / 6.0);
  return 2.0 * std::asin(std::min(z, 1.0)) / std::abs(k);
}

}  // namespace

CurveTrace trace_curve(const ImplicitSurface& s, const SurfacePoint& start, double step, int max_steps) {
  if (s.dim() != 2) throw std::invalid_argument("trace_curve needs a plane curve (n = 2)");
  if (!(step > 0.0)) throw std::invalid_argument("trace_curve: step must be positive");

  CurveTrace out;
  Vec x = project_to_surface(s, start.x).x;
  const Vec origin = x;
  double travelled = 0.0;

  for (int n = 0; n < max_steps; ++n) {
    const double k = plane_curvature(s, x);
    out.vertices.push_back(x);
    out.arclength.push_back(travelled);
    out.curvature.push_back(k);

    if (n >= 2) {
      const Vec d = origin - x;
      const double chord = d.norm();
      const double ahead = d.dot(tangent_2d(s, x));
      if (chord < 1e-6 * step) {
        out.length = travelled + (ahead >= 0.0 ? chord : -chord);
        out.vertices.pop_back();
        out.arclength.pop_back();
        out.curvature.pop_back();
        return out;
      }
      const double k0 = out.curvature.front();
      const double remaining = arc_from_chord(chord, 0.5 * (k + k0));
      if (ahead > 0.0 && remaining <= step * (1.0 + 1e-9)) {
        out.length = travelled + remaining;
        return out;
      }
    }

    const Vec k1 = tangent_2d(s, x);
    const Vec k2 = tangent_2d(s, x + 0.5 * step * k1);
    const Vec k3 = tangent_2d(s, x + 0.5 * step * k2);
    const Vec k4 = tangent_2d(s, x + step * k3);
    const Vec predicted = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x = project_to_surface(s, predicted).x;
    travelled += step;
  }
  std::ostringstream os;
  os << "curve '" << s.label() << "' did not close within " << max_steps << " steps";
  throw NonConvergence(os.str());
}

}  // namespace surfquant
