#pragma once

// Test-only oracles. Nothing here goes through jet arithmetic: derivatives
// come from central differences of plain values, or of symbolic derivatives
// evaluated as plain values.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "surfquant/expr.hpp"
#include "surfquant/linalg.hpp"

namespace oracle {

using surfquant::Expr;
using surfquant::Vec;

inline constexpr double kFdStep = 1e-5;

inline double value_at(const Expr& e, const Vec& x) { return e(surfquant::as_span(x)); }

/// Second-order central difference of a scalar function along axis i.
inline double central(const std::function<double(const Vec&)>& f, const Vec& x, int i, double h = kFdStep) {
  Vec xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

inline std::vector<double> fd_gradient(const Expr& e, const Vec& x) {
  std::vector<double> g;
  for (int i = 0; i < e.dim(); ++i) g.push_back(central([&](const Vec& y) { return value_at(e, y); }, x, i));
  return g;
}

/// H_ij = central difference along j of the symbolic d_i e.
inline std::vector<std::vector<double>> fd_hessian(const Expr& e, const Vec& x) {
  const int n = e.dim();
  std::vector<std::vector<double>> h(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    Expr di = surfquant::differentiate(e, i);
    for (int j = 0; j < n; ++j) h[i][j] = central([&](const Vec& y) { return value_at(di, y); }, x, j);
  }
  return h;
}

/// T_ijk = central difference along k of the symbolic d_i d_j e.
inline std::vector<double> fd_third(const Expr& e, const Vec& x) {
  const int n = e.dim();
  std::vector<double> t(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i) {
    Expr di = surfquant::differentiate(e, i);
    for (int j = 0; j < n; ++j) {
      Expr dij = surfquant::differentiate(di, j);
      for (int k = 0; k < n; ++k)
        t[static_cast<std::size_t>((i * n + j) * n + k)] =
            central([&](const Vec& y) { return value_at(dij, y); }, x, k);
    }
  }
  return t;
}

/// True when every sqrt/log argument and every denominator in `e` has
/// magnitude at least `margin` at x.
inline bool away_from_singular_loci(const Expr& e, const Vec& x, double margin = 1e-3) {
  bool ok = true;
  std::function<void(const Expr::NodePtr&)> visit = [&](const Expr::NodePtr& p) {
    if (!ok) return;
    const auto& n = *p;
    Expr::NodePtr guarded;
    switch (n.kind) {
      case surfquant::ExprKind::sqrt:
      case surfquant::ExprKind::log: guarded = n.lhs; break;
      case surfquant::ExprKind::divide: guarded = n.rhs; break;
      case surfquant::ExprKind::power:
        if (n.index < 0) guarded = n.lhs;
        break;
      default: break;
    }
    if (guarded) {
      double v = Expr(guarded, e.dim())(surfquant::as_span(x));
      if (std::abs(v) < margin) ok = false;
      if (n.kind == surfquant::ExprKind::sqrt || n.kind == surfquant::ExprKind::log)
        if (v < margin) ok = false;
    }
    if (n.lhs) visit(n.lhs);
    if (n.rhs) visit(n.rhs);
  };
  visit(e.node_ptr());
  return ok;
}

struct SuiteEntry {
  std::string text;
  int dim;
};

/// Fixed cross-validation suite: polynomials, |x|, exp/sin mixtures.
inline std::vector<SuiteEntry> jet_suite() {
  return {
      {"x1^2+x2^2-1", 2},
      {"x1*x2*x3", 3},
      {"sqrt(x1^2+x2^2+x3^2)", 3},
      {"exp(x1)*sin(x2)", 2},
      {"x1^3-3*x1*x2^2+x3^4", 3},
      {"(x1^2+x2^2+x3^2+0.75)^2-4*(x1^2+x2^2)", 3},
      {"log(1+x1^2+x2^2)", 2},
      {"cos(x1*x2)+x3", 3},
      {"exp(-x1^2-x2^2)*x1", 2},
      {"x1/(2+sin(x2))", 2},
      {"sqrt(x1^2+x2^2)-1", 2},
      {"x4*x1^2-x2*x3+exp(x4)/(1+x1^2)", 4},
  };
}

/// Uniform point in [lo, hi]^n.
inline Vec uniform_point(std::mt19937_64& rng, int n, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

/// Uniform direction on the unit sphere S^{n-1}.
inline Vec unit_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec x(n);
  do {
    for (int i = 0; i < n; ++i) x[i] = g(rng);
  } while (x.norm() < 1e-6);
  return x / x.norm();
}

/// |a - b| <= tol * max(1, |b|).
inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace oracle
