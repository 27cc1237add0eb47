#include "surfquant/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "surfquant/jet.hpp"

namespace surfquant {

namespace {

Expr zero(int n) { return Expr::constant(n, 0.0); }

void require_same_dim(const FirstOrderOp& x, const FirstOrderOp& y) {
  if (x.n != y.n) throw std::invalid_argument("operator dimensions differ");
}

// sum_i a_i d_i g
Expr directional(const std::vector<Expr>& a, const Expr& g, Differentiator& d) {
  std::vector<Expr> terms;
  for (int i = 0; i < g.dim(); ++i) {
    const Expr& ai = a[static_cast<std::size_t>(i)];
    if (ai.is_zero()) continue;
    Expr dg = d(g, i);
    if (!dg.is_zero()) terms.push_back(ai * dg);
  }
  return terms.empty() ? zero(g.dim()) : sum(terms);
}

double abs_at(const Expr& e, const Vec& x) { return std::abs(e(as_span(x))); }

double coefficient_max(const FirstOrderOp& x, const Vec& point) {
  double m = abs_at(x.b, point);
  for (const Expr& ai : x.a) m = std::max(m, abs_at(ai, point));
  return m;
}

}  // namespace

bool FirstOrderOp::is_zero() const {
  return b.is_zero() && std::all_of(a.begin(), a.end(), [](const Expr& e) { return e.is_zero(); });
}

FirstOrderOp multiplication(const Expr& g) {
  return {g.dim(), 0, std::vector<Expr>(static_cast<std::size_t>(g.dim()), zero(g.dim())), g};
}

FirstOrderOp derivative(int dim, int i) {
  std::vector<Expr> a(static_cast<std::size_t>(dim), zero(dim));
  a[static_cast<std::size_t>(i)] = Expr::constant(dim, 1.0);
  return {dim, 0, std::move(a), zero(dim)};
}

FirstOrderOp coordinate(int dim, int i) { return multiplication(Expr::variable(dim, i)); }

FirstOrderOp operator+(const FirstOrderOp& x, const FirstOrderOp& y) {
  require_same_dim(x, y);
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  if (x.ih_power != y.ih_power) throw std::invalid_argument("adding operators with different hbar powers");
  FirstOrderOp r{x.n, x.ih_power, {}, x.b + y.b};
  for (int i = 0; i < x.n; ++i) r.a.push_back(x.a[static_cast<std::size_t>(i)] + y.a[static_cast<std::size_t>(i)]);
  return r;
}

FirstOrderOp operator-(const FirstOrderOp& x, const FirstOrderOp& y) { return x + (-1.0) * y; }

FirstOrderOp operator*(const Expr& g, const FirstOrderOp& x) {
  FirstOrderOp r{x.n, x.ih_power, {}, g * x.b};
  for (const Expr& ai : x.a) r.a.push_back(g * ai);
  return r;
}

FirstOrderOp operator*(double c, const FirstOrderOp& x) { return Expr::constant(x.n, c) * x; }

FirstOrderOp right_multiply(const FirstOrderOp& x, const Expr& g, Differentiator& d) {
  FirstOrderOp r = g * x;
  r.b = r.b + directional(x.a, g, d);
  return r;
}

FirstOrderOp times_i_hbar(const FirstOrderOp& x) {
  FirstOrderOp r = (-1.0) * x;
  r.ih_power += 1;
  return r;
}

FirstOrderOp projected_momentum(const ImplicitSurface& s, int i) {
  const int n = s.dim();
  FirstOrderOp r{n, 1, {}, zero(n)};
  for (int j = 0; j < n; ++j) r.a.push_back(s.projector(i, j));
  return r;
}

Expr normal_divergence_term(const ImplicitSurface& s, int i, Differentiator& d) {
  const auto& nv = s.normal();
  std::vector<Expr> terms;
  for (int j = 0; j < s.dim(); ++j)
    terms.push_back(d(nv[static_cast<std::size_t>(i)] * nv[static_cast<std::size_t>(j)], j));
  return sum(terms);
}

FirstOrderOp adjoint_momentum(const ImplicitSurface& s, int i) {
  Differentiator d;
  FirstOrderOp r = projected_momentum(s, i);
  r.b = -normal_divergence_term(s, i, d);
  return r;
}

FirstOrderOp symmetrized_momentum(const ImplicitSurface& s, int i) {
  Differentiator d;
  FirstOrderOp r = projected_momentum(s, i);
  r.b = -0.5 * normal_divergence_term(s, i, d);
  return r;
}

FirstOrderOp commutator(const FirstOrderOp& x, const FirstOrderOp& y, Differentiator& d) {
  require_same_dim(x, y);
  const int n = x.n;
  FirstOrderOp r{n, x.ih_power + y.ih_power, {}, directional(x.a, y.b, d) - directional(y.a, x.b, d)};
  for (int j = 0; j < n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    r.a.push_back(directional(x.a, y.a[jj], d) - directional(y.a, x.a[jj], d));
  }
  return r;
}

FirstOrderOp commutator(const FirstOrderOp& x, const FirstOrderOp& y) {
  Differentiator d;
  return commutator(x, y, d);
}

OpResidual op_residual(const FirstOrderOp& x, const FirstOrderOp& y, const Vec& point) {
  require_same_dim(x, y);
  if (x.ih_power != y.ih_power && !x.is_zero() && !y.is_zero())
    return {point, std::max(coefficient_max(x, point), coefficient_max(y, point))};
  double m = abs_at(x.b - y.b, point);
  for (int i = 0; i < x.n; ++i)
    m = std::max(m, abs_at(x.a[static_cast<std::size_t>(i)] - y.a[static_cast<std::size_t>(i)], point));
  return {point, m};
}

double AlgebraResidual::max() const noexcept { return std::max({coordinate, momentum, symmetrized}); }

AlgebraResidual dirac_algebra_residual(const ImplicitSurface& s, int i, int j, const SurfacePoint& p) {
  const int n = s.dim();
  Differentiator d;
  const auto& g = s.gradient();
  std::vector<std::vector<Expr>> hess(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hess[static_cast<std::size_t>(a)].push_back(d(g[static_cast<std::size_t>(a)], b));
  const Expr grad2 = pow(s.grad_norm(), 2);

  // C_k = ((d_j f) d_ik f - (d_i f) d_jk f) / |grad f|^2
  std::vector<Expr> c;
  for (int k = 0; k < n; ++k) {
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j), uk = static_cast<std::size_t>(k);
    c.push_back((g[uj] * hess[ui][uk] - g[ui] * hess[uj][uk]) / grad2);
  }

  AlgebraResidual out;
  out.coordinate = op_residual(commutator(coordinate(n, i), projected_momentum(s, j), d),
                               times_i_hbar(multiplication(s.projector(i, j))), p.x)
                       .residual;

  FirstOrderOp rhs = multiplication(zero(n));
  FirstOrderOp rhs_sym = multiplication(zero(n));
  for (int k = 0; k < n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    rhs = rhs + c[uk] * projected_momentum(s, k);
    FirstOrderOp pk = symmetrized_momentum(s, k);
    rhs_sym = rhs_sym + 0.5 * (c[uk] * pk + right_multiply(pk, c[uk], d));
  }
  out.momentum =
      op_residual(commutator(projected_momentum(s, i), projected_momentum(s, j), d), times_i_hbar(rhs), p.x)
          .residual;
  out.symmetrized = op_residual(commutator(symmetrized_momentum(s, i), symmetrized_momentum(s, j), d),
                                times_i_hbar(rhs_sym), p.x)
                        .residual;
  return out;
}

OpResidual sphere_ordering_residual(const ImplicitSurface& s, int i, int j, const Vec& point) {
  const int n = s.dim();
  Differentiator d;
  std::vector<Expr> squares;
  for (int l = 0; l < n; ++l) squares.push_back(pow(Expr::variable(n, l), 2));
  const Expr r2 = sum(squares);
  const FirstOrderOp pi = projected_momentum(s, i), pj = projected_momentum(s, j);
  FirstOrderOp rhs = (1.0 / r2) * (right_multiply(pi, Expr::variable(n, j), d) -
                                   right_multiply(pj, Expr::variable(n, i), d));
  return op_residual(commutator(pi, pj, d), times_i_hbar(rhs), point);
}

OpResidual jacobi_residual(const ImplicitSurface& s, int i, int j, int k, const Vec& point) {
  Differentiator d;
  const FirstOrderOp a = projected_momentum(s, i), b = projected_momentum(s, j), c = projected_momentum(s, k);
  FirstOrderOp total = commutator(a, commutator(b, c, d), d) + commutator(b, commutator(c, a, d), d) +
                       commutator(c, commutator(a, b, d), d);
  return op_residual(total, multiplication(zero(s.dim())), point);
}

OpResidual constraint_identity_residual(const ImplicitSurface& s, const SurfacePoint& p) {
  const int n = s.dim();
  FirstOrderOp total = multiplication(zero(n));
  for (int i = 0; i < n; ++i) total = total + s.gradient()[static_cast<std::size_t>(i)] * projected_momentum(s, i);

  const Vec nv = normal(s, p.x).normal;
  OpResidual worst{p.x, coefficient_max(total, p.x)};
  for (double t : {-0.1, -0.05, 0.05, 0.1, 0.2}) {
    const Vec y = p.x + t * nv;
    const double r = coefficient_max(total, y);
    if (r > worst.residual) worst = {y, r};
  }
  return worst;
}

double apply(std::span<const FirstOrderOp> ops, const Expr& u, const Vec& x) {
  if (ops.size() > 2) throw std::invalid_argument("apply: at most two operators");
  int order = static_cast<int>(ops.size());
  Jet3 v = eval_jet(u, as_span(x), order);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    if (it->n != u.dim()) throw std::invalid_argument("apply: dimension mismatch");
    --order;
    Jet3 next = eval_jet(it->b, as_span(x), order) * v.truncated(order);
    for (int i = 0; i < it->n; ++i) {
      const Expr& ai = it->a[static_cast<std::size_t>(i)];
      if (!ai.is_zero()) next = next + eval_jet(ai, as_span(x), order) * v.partial(i);
    }
    v = next;
  }
  return v.value();
}

}  // namespace surfquant
