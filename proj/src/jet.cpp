#include "surfquant/jet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace surfquant {
namespace {

void check_compatible(const Jet3& a, const Jet3& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("jet dimensions differ");
}

// Visits the sorted simplex up to the given order.
template <typename F1, typename F2, typename F3>
void for_simplex(int n, int order, F1&& f1, F2&& f2, F3&& f3) {
  if (order >= 1)
    for (int i = 0; i < n; ++i) f1(i);
  if (order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) f2(i, j);
  if (order >= 3)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) f3(i, j, k);
}

}  // namespace

Jet3::Jet3(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("jet dimension out of range");
  if (order < 0 || order > 3) throw std::invalid_argument("jet order must be in [0, 3]");
  auto n = static_cast<std::size_t>(dim);
  g_.assign(n, 0.0);
  h_.assign(n * n, 0.0);
  t_.assign(n * n * n, 0.0);
}

Jet3 Jet3::constant(int dim, int order, double c) {
  Jet3 j(dim, order);
  j.v_ = c;
  return j;
}

Jet3 Jet3::variable(int dim, int order, int index, double x) {
  Jet3 j(dim, order);
  j.v_ = x;
  if (order >= 1) j.g_[static_cast<std::size_t>(index)] = 1.0;
  return j;
}

void Jet3::set_hess(int i, int j, double v) noexcept {
  h_[static_cast<std::size_t>(i * dim_ + j)] = v;
  h_[static_cast<std::size_t>(j * dim_ + i)] = v;
}

void Jet3::set_third(int i, int j, int k, double v) noexcept {
  auto at = [this](int a, int b, int c) { return static_cast<std::size_t>((a * dim_ + b) * dim_ + c); };
  t_[at(i, j, k)] = v;
  t_[at(i, k, j)] = v;
  t_[at(j, i, k)] = v;
  t_[at(j, k, i)] = v;
  t_[at(k, i, j)] = v;
  t_[at(k, j, i)] = v;
}

Jet3 Jet3::partial(int i) const {
  if (order_ < 1) throw std::logic_error("partial of an order-0 jet");
  Jet3 r(dim_, order_ - 1);
  r.v_ = grad(i);
  for_simplex(
      dim_, r.order_, [&](int a) { r.set_grad(a, hess(i, a)); },
      [&](int a, int b) { r.set_hess(a, b, third(i, a, b)); }, [](int, int, int) {});
  return r;
}

Jet3 Jet3::truncated(int order) const {
  if (order > order_) throw std::logic_error("cannot raise jet order");
  Jet3 r(dim_, order);
  r.v_ = v_;
  for_simplex(
      dim_, order, [&](int a) { r.set_grad(a, grad(a)); }, [&](int a, int b) { r.set_hess(a, b, hess(a, b)); },
      [&](int a, int b, int c) { r.set_third(a, b, c, third(a, b, c)); });
  return r;
}

bool Jet3::all_finite() const noexcept {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::isfinite(v_) && std::all_of(g_.begin(), g_.end(), finite) &&
         std::all_of(h_.begin(), h_.end(), finite) && std::all_of(t_.begin(), t_.end(), finite);
}

Jet3 operator+(const Jet3& a, const Jet3& b) {
  check_compatible(a, b);
  Jet3 r(a.dim(), std::min(a.order(), b.order()));
  r.set_value(a.value() + b.value());
  for_simplex(
      a.dim(), r.order(), [&](int i) { r.set_grad(i, a.grad(i) + b.grad(i)); },
      [&](int i, int j) { r.set_hess(i, j, a.hess(i, j) + b.hess(i, j)); },
      [&](int i, int j, int k) { r.set_third(i, j, k, a.third(i, j, k) + b.third(i, j, k)); });
  return r;
}

Jet3 operator-(const Jet3& a) { return -1.0 * a; }

Jet3 operator-(const Jet3& a, const Jet3& b) {
  check_compatible(a, b);
  Jet3 r(a.dim(), std::min(a.order(), b.order()));
  r.set_value(a.value() - b.value());
  for_simplex(
      a.dim(), r.order(), [&](int i) { r.set_grad(i, a.grad(i) - b.grad(i)); },
      [&](int i, int j) { r.set_hess(i, j, a.hess(i, j) - b.hess(i, j)); },
      [&](int i, int j, int k) { r.set_third(i, j, k, a.third(i, j, k) - b.third(i, j, k)); });
  return r;
}

Jet3 operator*(double s, const Jet3& a) {
  Jet3 r(a.dim(), a.order());
  r.set_value(s * a.value());
  for_simplex(
      a.dim(), r.order(), [&](int i) { r.set_grad(i, s * a.grad(i)); },
      [&](int i, int j) { r.set_hess(i, j, s * a.hess(i, j)); },
      [&](int i, int j, int k) { r.set_third(i, j, k, s * a.third(i, j, k)); });
  return r;
}

Jet3 operator+(const Jet3& a, double c) {
  Jet3 r = a;
  r.set_value(a.value() + c);
  return r;
}

Jet3 operator*(const Jet3& a, const Jet3& b) {
  check_compatible(a, b);
  Jet3 r(a.dim(), std::min(a.order(), b.order()));
  const double av = a.value();
  const double bv = b.value();
  r.set_value(av * bv);
  for_simplex(
      a.dim(), r.order(), [&](int i) { r.set_grad(i, a.grad(i) * bv + av * b.grad(i)); },
      [&](int i, int j) {
        r.set_hess(i, j, a.hess(i, j) * bv + a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i) + av * b.hess(i, j));
      },
      [&](int i, int j, int k) {
        r.set_third(i, j, k,
                    a.third(i, j, k) * bv + a.hess(i, j) * b.grad(k) + a.hess(i, k) * b.grad(j) +
                        a.hess(j, k) * b.grad(i) + a.grad(i) * b.hess(j, k) + a.grad(j) * b.hess(i, k) +
                        a.grad(k) * b.hess(i, j) + av * b.third(i, j, k));
      });
  return r;
}

Jet3 operator/(const Jet3& a, const Jet3& b) { return a * compose(Elementary::reciprocal, b); }

Jet3 compose(const std::array<double, 4>& phi, const Jet3& a) {
  Jet3 r(a.dim(), a.order());
  r.set_value(phi[0]);
  const double d1 = phi[1];
  const double d2 = phi[2];
  const double d3 = phi[3];
  for_simplex(
      a.dim(), r.order(), [&](int i) { r.set_grad(i, d1 * a.grad(i)); },
      [&](int i, int j) { r.set_hess(i, j, d2 * a.grad(i) * a.grad(j) + d1 * a.hess(i, j)); },
      [&](int i, int j, int k) {
        r.set_third(i, j, k,
                    d3 * a.grad(i) * a.grad(j) * a.grad(k) +
                        d2 * (a.hess(i, j) * a.grad(k) + a.hess(i, k) * a.grad(j) + a.hess(j, k) * a.grad(i)) +
                        d1 * a.third(i, j, k));
      });
  return r;
}

Jet3 compose(Elementary f, const Jet3& a, int exponent) {
  const double v = a.value();
  std::array<double, 4> phi{};
  switch (f) {
    case Elementary::sin: {
      double s = std::sin(v), c = std::cos(v);
      phi = {s, c, -s, -c};
      break;
    }
    case Elementary::cos: {
      double s = std::sin(v), c = std::cos(v);
      phi = {c, -s, -c, s};
      break;
    }
    case Elementary::exp: {
      double e = std::exp(v);
      phi = {e, e, e, e};
      break;
    }
    case Elementary::log:
      if (!(v > 0.0)) throw DomainError("log of a nonpositive value", "log(" + std::to_string(v) + ")");
      phi = {std::log(v), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)};
      break;
    case Elementary::sqrt: {
      if (v < 0.0 || (v == 0.0 && a.order() > 0))
        throw DomainError("sqrt outside its differentiable domain", "sqrt(" + std::to_string(v) + ")");
      double s = std::sqrt(v);
      if (a.order() == 0) {
        phi = {s, 0.0, 0.0, 0.0};
      } else {
        phi = {s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)};
      }
      break;
    }
    case Elementary::reciprocal:
      if (v == 0.0) throw DomainError("division by zero", "1/(" + std::to_string(v) + ")");
      phi = {1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v), -6.0 / (v * v * v * v)};
      break;
    case Elementary::power: {
      const int m = exponent;
      double coefficient = 1.0;
      for (int k = 0; k <= 3; ++k) {
        if (k > 0) coefficient *= static_cast<double>(m - k + 1);
        if (coefficient == 0.0) {
          phi[static_cast<std::size_t>(k)] = 0.0;
        } else if (v == 0.0 && m - k < 0) {
          if (k <= a.order()) throw DomainError("zero raised to a negative power", "^" + std::to_string(m));
          phi[static_cast<std::size_t>(k)] = 0.0;
        } else {
          phi[static_cast<std::size_t>(k)] = coefficient * std::pow(v, static_cast<double>(m - k));
        }
      }
      break;
    }
  }
  return compose(phi, a);
}

namespace {

class JetEvaluator {
 public:
  JetEvaluator(int dim, std::span<const double> x, int order) : dim_(dim), x_(x), order_(order) {}

  const Jet3& eval(const Expr::NodePtr& p) {
    if (auto it = memo_.find(p.get()); it != memo_.end()) return it->second;
    Jet3 r = compute(p);
    return memo_.emplace(p.get(), std::move(r)).first->second;
  }

 private:
  Jet3 compute(const Expr::NodePtr& p) {
    const Expr::Node& n = *p;
    switch (n.kind) {
      case ExprKind::constant: return Jet3::constant(dim_, order_, n.value);
      case ExprKind::variable: return Jet3::variable(dim_, order_, n.index, x_[static_cast<std::size_t>(n.index)]);
      case ExprKind::negate: return -eval(n.lhs);
      case ExprKind::add: return eval(n.lhs) + eval(n.rhs);
      case ExprKind::subtract: return eval(n.lhs) - eval(n.rhs);
      case ExprKind::multiply: return eval(n.lhs) * eval(n.rhs);
      case ExprKind::divide: {
        const Jet3& num = eval(n.lhs);
        const Jet3& den = eval(n.rhs);
        return num * guarded(p, Elementary::reciprocal, den);
      }
      case ExprKind::power: return guarded(p, Elementary::power, eval(n.lhs), n.index);
      case ExprKind::sin: return compose(Elementary::sin, eval(n.lhs));
      case ExprKind::cos: return compose(Elementary::cos, eval(n.lhs));
      case ExprKind::exp: return compose(Elementary::exp, eval(n.lhs));
      case ExprKind::log: return guarded(p, Elementary::log, eval(n.lhs));
      case ExprKind::sqrt: return guarded(p, Elementary::sqrt, eval(n.lhs));
    }
    throw std::logic_error("unhandled expression node");
  }

  // compose() that reports the failing node in input syntax.
  Jet3 guarded(const Expr::NodePtr& p, Elementary f, const Jet3& arg, int exponent = 0) {
    try {
      return compose(f, arg, exponent);
    } catch (const DomainError& e) {
      std::string what = e.what();
      throw DomainError(what.substr(0, what.find(" in '")), Expr(p, dim_).to_string());
    }
  }

  int dim_;
  std::span<const double> x_;
  int order_;
  std::unordered_map<const Expr::Node*, Jet3> memo_;
};

}  // namespace

Jet3 eval_jet(const Expr& e, std::span<const double> x, int order) {
  if (static_cast<int>(x.size()) != e.dim()) throw std::invalid_argument("point dimension mismatch");
  JetEvaluator ev(e.dim(), x, order);
  return ev.eval(e.node_ptr());
}

}  // namespace surfquant
