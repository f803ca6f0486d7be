#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hpafem/config.hpp"
#include "hpafem/error.hpp"
#include "hpafem/expression.hpp"
#include "hpafem/problems.hpp"

using namespace hpafem;

TEST_CASE("expressions evaluate with exact derivatives") {
  const Expression e = Expression::parse("2*x^3 - sin(pi*x)/4 + exp(-x) + abs(x - 0.5) + pow(x, 0.5)");
  const double x = 0.3;
  const auto [v, d] = e.value_and_derivative(x);
  using std::numbers::pi;
  CHECK(v == doctest::Approx(2 * x * x * x - std::sin(pi * x) / 4 + std::exp(-x) + 0.2 + std::sqrt(x)));
  CHECK(d == doctest::Approx(6 * x * x - pi * std::cos(pi * x) / 4 - std::exp(-x) - 1.0 + 0.5 / std::sqrt(x)));
  CHECK(Expression::parse("-x^2").value(3.0) == -9.0);
  CHECK(Expression::parse("2^-1").value(0.0) == 0.5);
  CHECK(Expression::parse("1 - 2 - 3").value(0.0) == -4.0);
  CHECK(Expression::parse("12 / 3 / 2").value(0.0) == 2.0);
}

TEST_CASE("polynomial degree detection") {
  CHECK(Expression::parse("3").polynomial_degree() == 0);
  CHECK(Expression::parse("x*(1-x)").polynomial_degree() == 2);
  CHECK(Expression::parse("(x+1)^3/2").polynomial_degree() == 3);
  CHECK(Expression::parse("x^0.5").polynomial_degree() == -1);
  CHECK(Expression::parse("sin(x)").polynomial_degree() == -1);
  CHECK(Expression::parse("1/x").polynomial_degree() == -1);
  CHECK(Expression::parse("2*pi").to_function().constant_value() == doctest::Approx(2 * std::numbers::pi));
  CHECK(Expression::parse("x^2").to_function().piece_degree() == 2);
}

TEST_CASE("parse errors carry the column") {
  for (const char* bad : {"", "x +", "foo(x)", "(x", "x $ 2", "pow(x)"}) {
    try {
      Expression::parse(bad);
      FAIL("expected a parse error for " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
      CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
  }
}

TEST_CASE("configuration round-trips") {
  RunConfig c;
  c.seed = 17;
  c.problem.name = "inline";
  c.problem.f1 = "pi^2*sin(pi*x)";
  c.problem.u_exact = "sin(pi*x)";
  c.problem.nu_star = 1.0;
  c.problem.singular = {0.0};
  c.problem.kinks = {1.0 / 3.0};
  c.roots.breaks = {0.0, 0.1, 1.0};
  c.params.delta = 1.0 / 7.0;
  c.params.mu = 0.3;
  c.params.rule = ModifiedErrorRule::ParentError;
  c.params.target_eps = 1e-5;
  c.output.trace_reduce = true;
  const std::string text = emit_config(c);
  CHECK(parse_config(text) == c);
  CHECK(emit_config(parse_config(text)) == text);
  CHECK(parse_config("") == RunConfig{});
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_config("problem:\n  nmae: x\n"), Error);
  CHECK_THROWS_AS(parse_config("params:\n  mu: [1, 2]\n"), Error);
  CHECK_THROWS_AS(parse_config("params:\n  rule: other\n"), Error);
  CHECK_THROWS_AS(parse_config("a: [\n"), Error);
}

TEST_CASE("problem registry") {
  ProblemSpec s;
  s.name = "inline";
  s.f1 = "1";
  s.nu = "1 + x";
  const Problem p = make_problem(s);
  CHECK(p.data.nu_star == doctest::Approx(1.0));
  CHECK(p.data.nu_sup == doctest::Approx(2.0));
  CHECK_FALSE(p.u_exact);
  s.name = "nope";
  CHECK_THROWS_AS(make_problem(s), Error);
  CHECK_THROWS_AS(xalpha_problem(0.4), Error);
}

TEST_CASE("lacunary polynomial has the required orthogonality") {
  for (int levels = 1; levels <= 4; ++levels) {
    const LegendreCoeffs w = lacunary_polynomial(levels);
    CHECK(w.degree() == (1 << levels));
    CHECK(l2_norm_sq(w) == doctest::Approx(1.0));
    CHECK(std::abs(integral(w)) <= 1e-12);
    Function f([w](double x) { return w(x); });
    f.set_piece_degree(w.degree());
    for (int l = 0; l < levels; ++l) {
      for (int k = 0; k < (1 << l); ++k) {
        const double h = std::ldexp(1.0, -l);
        // Orthogonal to the linear polynomials with vanishing mean: the L2
        // projection onto P1 is the mean.
        const LegendreCoeffs q = project_l2(f, Interval{k * h, (k + 1) * h}, 1);
        CHECK(std::abs(q.c[1]) <= 1e-10);
      }
    }
  }
}
