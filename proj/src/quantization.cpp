#include "surfquant/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "surfquant/jet.hpp"
#include "surfquant/operators.hpp"

namespace surfquant {

std::string to_string(PotentialMethod m) {
  switch (m) {
    case PotentialMethod::general_formula: return "general-formula";
    case PotentialMethod::sphere_closed_form: return "sphere-closed-form";
    case PotentialMethod::paraboloid_closed_form: return "paraboloid-closed-form";
    case PotentialMethod::distance_curvature_form: return "distance-curvature-form";
  }
  return "unknown";
}

PotentialReport quantum_potential_general(const ImplicitSurface& s, const SurfacePoint& p, double hbar) {
  const int n = s.dim();
  normal(s, p.x);  // degenerate-gradient check
  const Jet3 jf = eval_jet(s.f(), as_span(p.x), 3);

  std::vector<Jet3> grad;
  Jet3 norm2(n, 2);
  for (int i = 0; i < n; ++i) {
    grad.push_back(jf.partial(i));
    norm2 = norm2 + grad.back() * grad.back();
  }
  const Jet3 norm = compose(Elementary::sqrt, norm2);
  std::vector<Jet3> nv;
  for (const Jet3& gi : grad) nv.push_back(gi / norm);

  // w_i = sum_j d_j (n_i n_j), kept to first order
  std::vector<Jet3> w;
  for (int i = 0; i < n; ++i) {
    Jet3 wi(n, 1);
    for (int j = 0; j < n; ++j)
      wi = wi + (nv[static_cast<std::size_t>(i)] * nv[static_cast<std::size_t>(j)]).partial(j);
    w.push_back(wi);
  }

  double square = 0.0, tangential = 0.0;
  for (int i = 0; i < n; ++i) {
    const Jet3& wi = w[static_cast<std::size_t>(i)];
    square += wi.value() * wi.value();
    double along = 0.0;
    for (int k = 0; k < n; ++k) along += nv[static_cast<std::size_t>(k)].value() * wi.grad(k);
    tangential += wi.grad(i) - nv[static_cast<std::size_t>(i)].value() * along;
  }

  PotentialReport r;
  r.surface = s.label();
  r.gauge = s.label();
  r.point = p.x;
  r.value = hbar * hbar * (-square / 8.0 + tangential / 4.0);
  r.method = PotentialMethod::general_formula;
  return r;
}

double quantum_potential_sphere(int n, double radius, double hbar) {
  if (n < 1 || !(radius > 0.0)) throw std::invalid_argument("quantum_potential_sphere: need n >= 1, R > 0");
  const double m = n - 1;
  return hbar * hbar * m * m / (8.0 * radius * radius);
}

double quantum_potential_paraboloid(std::span<const double> kappa, double hbar) {
  double total = 0.0, squares = 0.0;
  for (double k : kappa) {
    total += k;
    squares += k * k;
  }
  return hbar * hbar / 8.0 * (total * total + 2.0 * squares);
}

double quantum_potential_distance(const ImplicitSurface& s, const SurfacePoint& p, double hbar) {
  const double mean = shape_and_curvatures(s, p).curvatures.sum();
  return hbar * hbar / 8.0 * mean * mean;
}

namespace {

struct NormalTerms {
  double laplacian = 0.0;   // Lap u
  double normal_hess = 0.0; // n^T Hess(u) n
  double along = 0.0;       // n.grad u
  double drift = 0.0;       // (D n).grad u
  double div_n = 0.0;
};

NormalTerms normal_terms(const ImplicitSurface& s, const Expr& u, const SurfacePoint& p) {
  if (u.dim() != s.dim()) throw std::invalid_argument("test function dimension mismatch");
  const int n = s.dim();
  const Vec nv = normal(s, p.x).normal;
  const Mat jac = normal_jacobian(s, p.x);
  const Vec dn = jac.transpose() * nv;  // (D n)_k = sum_i n_i d_i n_k
  const Jet3 ju = eval_jet(u, as_span(p.x), 2);

  NormalTerms t;
  t.div_n = jac.trace();
  for (int i = 0; i < n; ++i) {
    t.laplacian += ju.hess(i, i);
    t.along += nv[i] * ju.grad(i);
    t.drift += dn[i] * ju.grad(i);
    for (int k = 0; k < n; ++k) t.normal_hess += nv[i] * ju.hess(i, k) * nv[k];
  }
  return t;
}

double tolerance_for(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

}  // namespace

double laplace_beltrami(const ImplicitSurface& s, const Expr& u, const SurfacePoint& p) {
  const NormalTerms t = normal_terms(s, u, p);
  return t.laplacian - t.normal_hess - t.div_n * t.along;
}

LbResult lb_apply(const ImplicitSurface& s, const Expr& u, const SurfacePoint& p) {
  const NormalTerms t = normal_terms(s, u, p);
  LbResult r;
  r.value = t.laplacian - (t.normal_hess + t.drift) - t.div_n * t.along;
  r.residuals = distance_gauge_residuals(s, p);
  r.warning = !r.residuals.distance_like(1e-6);
  return r;
}

Vec drift_term(const ImplicitSurface& s, const SurfacePoint& p) {
  const int n = s.dim();
  Vec out(n);
  for (int k = 0; k < n; ++k) {
    const Expr xk = Expr::variable(n, k);
    out[k] = lb_apply(s, xk, p).value - laplace_beltrami(s, xk, p);
  }
  return out;
}

AmbiguityReport ambiguity_report(const GaugeFamily& g, const Vec& p, double hbar) {
  if (g.gauges.empty()) throw std::invalid_argument("ambiguity_report: empty gauge family");
  AmbiguityReport r;
  r.surface = g.surface;
  r.point = p;
  double lo = 0.0, hi = 0.0;
  for (const auto& [label, surface] : g.gauges) {
    const SurfacePoint sp = make_surface_point(surface, p, 1e-9);
    PotentialReport row = quantum_potential_general(surface, sp, hbar);
    row.surface = g.surface;
    row.gauge = label;
    if (r.rows.empty()) {
      lo = hi = row.value;
      r.recommended = quantum_potential_distance(surface, sp, hbar);
    }
    lo = std::min(lo, row.value);
    hi = std::max(hi, row.value);
    r.rows.push_back(std::move(row));
  }
  r.spread = hi - lo;
  r.ambiguous = r.spread > 1e-6;
  return r;
}

double hamiltonian_apply(const ImplicitSurface& s, HamiltonianVariant variant, const Expr& u,
                         const SurfacePoint& p, double hbar) {
  const int n = s.dim();
  const double h2 = hbar * hbar;
  const double podolsky = -0.5 * h2 * lb_apply(s, u, p).value;

  // (-i hbar)^2 = -hbar^2 multiplies the real coefficients returned by apply.
  double product = 0.0;
  for (int i = 0; i < n; ++i) {
    const FirstOrderOp ops[] = {adjoint_momentum(s, i), projected_momentum(s, i)};
    product += apply(ops, u, p.x);
  }
  product *= -0.5 * h2;
  if (std::abs(product - podolsky) > tolerance_for(podolsky)) {
    std::ostringstream os;
    os << "Podolsky Hamiltonian cross-check failed on '" << s.label() << "': " << podolsky << " vs " << product;
    throw Error(os.str());
  }
  if (variant == HamiltonianVariant::podolsky) return podolsky;

  const double u0 = u(as_span(p.x));
  const double dirac = podolsky + quantum_potential_general(s, p, hbar).value * u0;
  double squares = 0.0;
  for (int i = 0; i < n; ++i) {
    const FirstOrderOp pi = symmetrized_momentum(s, i);
    const FirstOrderOp ops[] = {pi, pi};
    squares += apply(ops, u, p.x);
  }
  squares *= -0.5 * h2;
  if (std::abs(squares - dirac) > tolerance_for(dirac)) {
    std::ostringstream os;
    os << "Dirac Hamiltonian cross-check failed on '" << s.label() << "': " << dirac << " vs " << squares;
    throw Error(os.str());
  }
  return dirac;
}

}  // namespace surfquant
