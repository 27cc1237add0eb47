#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "surfquant/jet.hpp"

using namespace surfquant;

namespace {

Jet3 jet_of(const char* text, int dim, std::vector<double> x, int order = 3) {
  return eval_jet(parse(text, dim), x, order);
}

}  // namespace

TEST_CASE("quadratic jet") {
  Jet3 j = jet_of("x1^2+x2^2-1", 2, {0.6, 0.8});
  CHECK(j.value() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(j.grad(0) == doctest::Approx(1.2));
  CHECK(j.grad(1) == doctest::Approx(1.6));
  CHECK(j.hess(0, 0) == 2.0);
  CHECK(j.hess(1, 1) == 2.0);
  CHECK(j.hess(0, 1) == 0.0);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) CHECK(j.third(i, k, l) == 0.0);
}

TEST_CASE("exp jet has every derivative equal to the value") {
  Jet3 j = jet_of("exp(x1)", 1, {0.3});
  const double e = std::exp(0.3);
  CHECK(j.value() == doctest::Approx(e));
  CHECK(j.grad(0) == doctest::Approx(e));
  CHECK(j.hess(0, 0) == doctest::Approx(e));
  CHECK(j.third(0, 0, 0) == doctest::Approx(e));
}

TEST_CASE("mixed third derivative of x1 x2 x3") {
  Jet3 j = jet_of("x1*x2*x3", 3, {1.0, 2.0, 3.0});
  CHECK(j.value() == 6.0);
  CHECK(j.third(0, 1, 2) == 1.0);
  CHECK(j.third(2, 0, 1) == 1.0);
  CHECK(j.third(0, 0, 1) == 0.0);
  CHECK(j.hess(0, 1) == 3.0);
}

TEST_CASE("product of variable jets") {
  Jet3 x = Jet3::variable(1, 3, 0, 3.0);
  Jet3 p = x * x;
  CHECK(p.value() == 9.0);
  CHECK(p.grad(0) == 6.0);
  CHECK(p.hess(0, 0) == 2.0);
  CHECK(p.third(0, 0, 0) == 0.0);
}

TEST_CASE("sqrt composition gives the unit normal") {
  Jet3 a = Jet3::variable(2, 2, 0, 3.0);
  Jet3 b = Jet3::variable(2, 2, 1, 4.0);
  Jet3 r = compose(Elementary::sqrt, a * a + b * b);
  CHECK(r.value() == doctest::Approx(5.0));
  CHECK(r.grad(0) == doctest::Approx(0.6));
  CHECK(r.grad(1) == doctest::Approx(0.8));
}

TEST_CASE("adding zero is exact") {
  Jet3 a = jet_of("sin(x1)*x2+x1^3", 2, {0.4, -1.1});
  Jet3 z(2, 3);
  Jet3 s = a + z;
  CHECK(s.value() == a.value());
  for (int i = 0; i < 2; ++i) {
    CHECK(s.grad(i) == a.grad(i));
    for (int k = 0; k < 2; ++k) {
      CHECK(s.hess(i, k) == a.hess(i, k));
      for (int l = 0; l < 2; ++l) CHECK(s.third(i, k, l) == a.third(i, k, l));
    }
  }
}

TEST_CASE("partial and truncation") {
  Jet3 j = jet_of("x1^3*x2", 2, {2.0, 5.0});
  Jet3 d = j.partial(0);
  CHECK(d.order() == 2);
  CHECK(d.value() == doctest::Approx(60.0));     // 3 x1^2 x2
  CHECK(d.grad(0) == doctest::Approx(60.0));     // 6 x1 x2
  CHECK(d.hess(0, 1) == doctest::Approx(12.0));  // 6 x1
  Jet3 t = j.truncated(1);
  CHECK(t.order() == 1);
  CHECK(t.hess(0, 0) == 0.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(jet_of("log(x1)", 1, {-1.0}), DomainError);
  CHECK_THROWS_AS(jet_of("sqrt(x1)", 1, {0.0}), DomainError);
  CHECK_THROWS_AS(jet_of("1/(x1-2)", 1, {2.0}), DomainError);
  try {
    jet_of("x2+log(x1-1)", 2, {0.5, 0.0});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.subexpression() == "log(x1-1)");
  }
}

TEST_CASE("property: jets agree with finite differences on the suite") {
  std::mt19937_64 rng(42);
  for (const auto& entry : oracle::jet_suite()) {
    CAPTURE(entry.text);
    Expr e = parse(entry.text, entry.dim);
    const int n = entry.dim;
    int accepted = 0;
    while (accepted < 20) {
      Vec x = oracle::uniform_point(rng, n);
      if (!oracle::away_from_singular_loci(e, x)) continue;
      ++accepted;
      Jet3 j = eval_jet(e, as_span(x), 3);
      auto g = oracle::fd_gradient(e, x);
      auto h = oracle::fd_hessian(e, x);
      auto t = oracle::fd_third(e, x);
      CHECK(oracle::close(j.value(), oracle::value_at(e, x), 1e-12));
      for (int i = 0; i < n; ++i) {
        CHECK(oracle::close(j.grad(i), g[static_cast<std::size_t>(i)], 1e-6));
        for (int k = 0; k < n; ++k) {
          CHECK(oracle::close(j.hess(i, k), h[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], 1e-6));
          for (int l = 0; l < n; ++l)
            CHECK(oracle::close(j.third(i, k, l), t[static_cast<std::size_t>((i * n + k) * n + l)], 1e-6));
        }
      }
    }
  }
}

TEST_CASE("property: derivative tensors are exactly symmetric") {
  std::mt19937_64 rng(5);
  for (const auto& entry : oracle::jet_suite()) {
    Expr e = parse(entry.text, entry.dim);
    const int n = entry.dim;
    for (int trial = 0; trial < 5; ++trial) {
      Vec x = oracle::uniform_point(rng, n);
      if (!oracle::away_from_singular_loci(e, x)) continue;
      Jet3 j = eval_jet(e, as_span(x), 3);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          CHECK(j.hess(i, k) == j.hess(k, i));
          for (int l = 0; l < n; ++l) {
            const double v = j.third(i, k, l);
            CHECK(v == j.third(i, l, k));
            CHECK(v == j.third(k, i, l));
            CHECK(v == j.third(l, k, i));
          }
        }
    }
  }
}
