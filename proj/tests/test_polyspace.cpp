#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hpafem/error.hpp"
#include "hpafem/polyspace.hpp"

using namespace hpafem;

namespace {
Function cubic() {
  Function f([](double x) { return 1.0 + x - 2.0 * x * x * x; }, [](double x) { return 1.0 - 6.0 * x * x; });
  f.set_piece_degree(3);
  return f;
}
}  // namespace

TEST_CASE("Gauss-Legendre rules integrate degree 2n-1 exactly") {
  for (int n = 1; n <= 20; ++n) {
    const auto& q = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("Legendre arithmetic is exact") {
  const LegendreCoeffs q({0.25, 0.75}, {1.0, -2.0, 0.5, 3.0});
  const LegendreCoeffs dq = derivative(q);
  const LegendreCoeffs back = antiderivative(dq, q(0.25));
  for (double x : {0.25, 0.3, 0.5, 0.71}) {
    CHECK(back(x) == doctest::Approx(q(x)).epsilon(1e-13));
    const double h = 1e-6;
    CHECK(dq(x) == doctest::Approx((q(x + h) - q(x - h)) / (2 * h)).epsilon(1e-6));
  }
  const LegendreCoeffs prod = multiply(q, dq);
  CHECK(prod.degree() == 5);
  for (double x : {0.3, 0.6}) CHECK(prod(x) == doctest::Approx(q(x) * dq(x)).epsilon(1e-12));
  CHECK(l2_norm_sq(q) == doctest::Approx(integral(multiply(q, q))).epsilon(1e-13));
  CHECK(mean(q) == doctest::Approx(integral(q) / 0.5));
}

TEST_CASE("projections reproduce polynomials") {
  const Function f = cubic();
  const Interval k{0.2, 0.7};
  const LegendreCoeffs p = project_l2(f, k, 3);
  const LegendreCoeffs ph = project_h1(f, k, 3);
  for (double x : {0.2, 0.33, 0.7}) {
    CHECK(p(x) == doctest::Approx(f(x)).epsilon(1e-13));
    CHECK(ph(x) == doctest::Approx(f(x)).epsilon(1e-13));
  }
  CHECK(projection_error_sq(f, k, 3) == 0.0);
  CHECK_THROWS_AS(project_h1(f, k, 0), Error);
  CHECK_THROWS_AS(project_h1(Function([](double x) { return x; }), k, 2), Error);
}

TEST_CASE("H1 projection keeps the mean and projects the derivative") {
  const Function f([](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
  const Interval k{0.0, 0.5};
  const LegendreCoeffs q = project_h1(f, k, 2);
  CHECK(mean(q) == doctest::Approx((std::exp(0.5) - 1.0) / 0.5).epsilon(1e-13));
  const LegendreCoeffs d = derivative(q);
  const LegendreCoeffs pd = project_l2(f.derivative_function(), k, 1);
  for (double x : {0.0, 0.2, 0.5}) CHECK(d(x) == doctest::Approx(pd(x)).epsilon(1e-12));
}

TEST_CASE("projection error: Parseval and direct quadrature agree") {
  const Function f([](double x) { return std::sin(3.0 * x); }, [](double x) { return 3.0 * std::cos(3.0 * x); });
  const Interval k{0.0, 1.0};
  for (int p = 0; p <= 8; ++p) {
    const LegendreCoeffs q = project_l2(f, k, p);
    const auto& g = gauss_legendre(40);
    double direct = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double x = 0.5 + 0.5 * g.nodes[i];
      direct += 0.5 * g.weights[i] * std::pow(f(x) - q(x), 2);
    }
    CHECK(projection_error_sq(f, k, p) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("projection error is non-increasing in p and resolves a singular endpoint") {
  const Function g([](double x) { return 0.7 * std::pow(x, -0.3); }, {}, {}, {0.0});
  double prev = INFINITY;
  for (int p = 0; p <= 10; ++p) {
    const double e = projection_error_sq(g, {0.0, 1.0}, p);
    CHECK(e <= prev * (1.0 + 1e-12));
    prev = e;
  }
  // ||g||^2 = 0.49 / 0.4 and the mean is 1.
  CHECK(projection_error_sq(g, {0.0, 1.0}, 0) == doctest::Approx(0.49 / 0.4 - 1.0).epsilon(1e-10));
}

TEST_CASE("piecewise polynomials") {
  const PiecewisePoly z = PiecewisePoly::zero(std::vector<double>{0.0, 0.5, 1.0});
  CHECK(z.size() == 2);
  const PiecewisePoly q({LegendreCoeffs({0.0, 0.5}, {1.0, 1.0}), LegendreCoeffs({0.5, 1.0}, {0.0, 2.0})});
  CHECK(q(0.25) == doctest::Approx(1.0));
  CHECK(q.locate(0.75) == 1);
  const PiecewisePoly a = antiderivative(q, 0.0);
  CHECK(a(0.5) == doctest::Approx(integral(q.piece(0))));
  CHECK(h1_seminorm_sq(a) == doctest::Approx(l2_norm_sq(q)));
  const Function f = q.as_function();
  CHECK(f.kinks().size() == 1);
  CHECK(f.piece_degree() == 1);
  CHECK_THROWS_AS(PiecewisePoly({LegendreCoeffs({0.0, 0.5}, {1.0})}), Error);
  CHECK_FALSE(q.to_json().empty());
}
