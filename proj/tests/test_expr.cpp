#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "surfquant/expr.hpp"
#include "surfquant/jet.hpp"

using namespace surfquant;

namespace {

std::string structure(const Expr::Node& n) {
  switch (n.kind) {
    case ExprKind::constant:
      return n.value == std::floor(n.value) ? std::to_string(static_cast<long>(n.value)) : "c";
    case ExprKind::variable: return "x" + std::to_string(n.index + 1);
    case ExprKind::add: return "Add(" + structure(*n.lhs) + "," + structure(*n.rhs) + ")";
    case ExprKind::subtract: return "Sub(" + structure(*n.lhs) + "," + structure(*n.rhs) + ")";
    case ExprKind::multiply: return "Mul(" + structure(*n.lhs) + "," + structure(*n.rhs) + ")";
    case ExprKind::power: return "Pow(" + structure(*n.lhs) + "," + std::to_string(n.index) + ")";
    case ExprKind::negate: return "Neg(" + structure(*n.lhs) + ")";
    default: return "?";
  }
}

// Random polynomial in n variables with small integer exponents.
Expr random_polynomial(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> terms(1, 5), power(0, 3), var(0, n - 1);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  Expr acc = Expr::constant(n, coeff(rng));
  for (int t = terms(rng); t > 0; --t) {
    Expr mono = Expr::constant(n, coeff(rng));
    for (int f = 0; f < 3; ++f) mono = mono * pow(Expr::variable(n, var(rng)), power(rng));
    acc = acc + mono;
  }
  return acc;
}

}  // namespace

TEST_CASE("parse builds the expected tree") {
  Expr e = parse("x1^2+x2^2-1", 2);
  CHECK(structure(e.node()) == "Sub(Add(Pow(x1,2),Pow(x2,2)),1)");
  CHECK(e.dim() == 2);
}

TEST_CASE("parse evaluates functions") {
  Expr e = parse("sin(x1)*x2", 2);
  CHECK(e(std::vector<double>{0.0, 5.0}) == 0.0);
  CHECK(parse(" 2 * ( x1 + 3 ) ", 1)(std::vector<double>{1.0}) == doctest::Approx(8.0));
  CHECK(parse("1.5e1", 1)(std::vector<double>{0.0}) == doctest::Approx(15.0));
}

TEST_CASE("operator precedence and associativity") {
  std::vector<double> x{3.0, 2.0};
  CHECK(parse("-x1^2", 2)(x) == -9.0);
  CHECK(parse("x1-x2-1", 2)(x) == 0.0);
  CHECK(parse("x1/x2/2", 2)(x) == doctest::Approx(0.75));
  CHECK(parse("x2^2^3", 2)(x) == 256.0);  // 2^(2^3)
  CHECK(parse("2*x1^2", 2)(x) == 18.0);
  CHECK(parse("--x1", 2)(x) == 3.0);
}

TEST_CASE("parse diagnostics") {
  auto offset_of = [](const char* text, int n) -> long {
    try {
      parse(text, n);
    } catch (const ParseError& e) {
      CHECK(!e.diagnostic().message.empty());
      return static_cast<long>(e.diagnostic().offset);
    }
    return -1;
  };
  CHECK(offset_of("x1+*x2", 2) == 3);
  CHECK(offset_of("x3", 2) == 0);
  CHECK(offset_of("foo(x1)", 1) == 0);
  CHECK(offset_of("sin x1", 1) == 4);
  CHECK(offset_of("(x1", 1) == 3);
  CHECK(offset_of("x1 x1", 1) == 3);
  CHECK(offset_of("x1^1.5", 1) == 3);
  CHECK(offset_of("", 1) == 0);
  CHECK(offset_of("x0", 1) == 0);

  try {
    parse("x1+*x2", 2);
  } catch (const ParseError& e) {
    CHECK(e.diagnostic().expected.size() >= 3);
  }
}

TEST_CASE("differentiate") {
  std::vector<double> x{0.7, -1.3};
  Expr d1 = differentiate(parse("x1^2+x2^2", 2), 0);
  CHECK(d1(x) == doctest::Approx(1.4));
  CHECK(differentiate(parse("x1^2+x2^2", 2), 0).to_string() == "2*x1");

  Expr e = parse("sin(x1)*x2", 2);
  CHECK(differentiate(e, 1).to_string() == "sin(x1)");

  Expr c = parse("3.5", 2);
  CHECK(differentiate(c, 0).is_zero());
  CHECK(differentiate(c, 1).is_zero());

  Expr q = parse("log(x1)/sqrt(x2)", 2);
  std::vector<double> y{2.0, 4.0};
  CHECK(differentiate(q, 0)(y) == doctest::Approx(0.25));
  CHECK(differentiate(q, 1)(y) == doctest::Approx(-std::log(2.0) / 16.0));
}

TEST_CASE("evaluation-time domain errors name the subexpression") {
  Expr e = parse("log(x1-1)", 1);
  try {
    e(std::vector<double>{0.5});
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.subexpression() == "log(x1-1)");
  }
  CHECK_THROWS_AS(parse("1/x1", 1)(std::vector<double>{0.0}), DomainError);
  CHECK_THROWS_AS(parse("sqrt(x1)", 1)(std::vector<double>{-1.0}), DomainError);
}

TEST_CASE("norm helper") {
  Expr r = norm(3);
  CHECK(r(std::vector<double>{1.0, 2.0, 2.0}) == doctest::Approx(3.0));
}

TEST_CASE("property: symbolic derivative matches jet gradient on random polynomials") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    Expr p = random_polynomial(rng, n);
    Vec x = oracle::uniform_point(rng, n);
    Jet3 j = eval_jet(p, as_span(x), 1);
    for (int i = 0; i < n; ++i) {
      double symbolic = differentiate(p, i)(as_span(x));
      CHECK(oracle::close(symbolic, j.grad(i), 1e-12));
    }
  }
}

TEST_CASE("property: printing then parsing preserves the jet") {
  std::mt19937_64 rng(11);
  for (const auto& entry : oracle::jet_suite()) {
    Expr e = parse(entry.text, entry.dim);
    std::vector<Expr> forms{e, differentiate(e, 0), -e * e + 2.0, e / (3.0 + e * e)};
    for (const Expr& f : forms) {
      Expr g = parse(f.to_string(), f.dim());
      int accepted = 0;
      while (accepted < 10) {
        Vec x = oracle::uniform_point(rng, f.dim());
        if (!oracle::away_from_singular_loci(e, x)) continue;
        ++accepted;
        Jet3 a = eval_jet(f, as_span(x), 3);
        Jet3 b = eval_jet(g, as_span(x), 3);
        CHECK(oracle::close(a.value(), b.value(), 1e-12));
        for (int i = 0; i < f.dim(); ++i) {
          CHECK(oracle::close(a.grad(i), b.grad(i), 1e-12));
          for (int k = 0; k < f.dim(); ++k) CHECK(oracle::close(a.hess(i, k), b.hess(i, k), 1e-12));
        }
      }
    }
  }
}
