#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "hpafem/fem1d.hpp"
#include "hpafem/problems.hpp"

using namespace hpafem;

namespace {
RootsPtr unit() { return std::make_shared<const RootPartition>(RootPartition::uniform(1)); }

HpPartition mixed() {
  HpPartition d = HpPartition::from_roots(unit(), 3);
  d = bisect(d, 0);
  d = bisect(d, 0);
  d = raise_degree(d, 2, 2);
  return d;
}
}  // namespace

TEST_CASE("shape functions: hats and bubbles") {
  CHECK(shape_value(0, -1.0) == 1.0);
  CHECK(shape_value(1, 1.0) == 1.0);
  for (int k = 2; k <= 8; ++k) {
    CHECK(shape_value(k, -1.0) == doctest::Approx(0.0));
    CHECK(shape_value(k, 1.0) == doctest::Approx(0.0));
    const double h = 1e-6;
    CHECK(shape_derivative(k, 0.3) == doctest::Approx((shape_value(k, 0.3 + h) - shape_value(k, 0.3 - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("conforming space numbering") {
  const ConformingSpace s(mixed());
  // Two interior vertices, bubbles 2 + 2 + 4.
  CHECK(s.dim() == 2 + 2 + 2 + 4);
  CHECK(s.global_dof(0, 0) == -1);
  CHECK(s.global_dof(2, 1) == -1);
  CHECK(s.global_dof(0, 1) == 0);
  CHECK(s.global_dof(1, 0) == 0);
}

TEST_CASE("the discrete space reproduces polynomial solutions") {
  const Problem p = poly_exact_problem();
  const GalerkinSolution s = solve(ConformingSpace(HpPartition::from_roots(unit(), 2)), Load{p.data.f1, p.data.f2}, Coefficients{});
  for (double x : {0.1, 0.5, 0.9}) CHECK(s.piecewise(x) == doctest::Approx((*p.u_exact)(x)).epsilon(1e-13));
}

TEST_CASE("linear elements are nodally exact for -u'' = f") {
  using std::numbers::pi;
  const Function f([](double x) { return pi * pi * std::sin(pi * x); }, [](double x) { return pi * pi * pi * std::cos(pi * x); });
  HpPartition d = HpPartition::from_roots(unit(), 1);
  d = bisect(d, 0);
  d = bisect(d, 1);
  const GalerkinSolution s = solve(ConformingSpace(d), Load{f, Function::zero()}, Coefficients{});
  for (double x : d.breakpoints()) CHECK(s.piecewise(x) == doctest::Approx(std::sin(pi * x)).epsilon(1e-12));
}

TEST_CASE("serial and parallel assembly agree bitwise") {
  const Problem p = sine_var_problem();
  const ConformingSpace s(mixed());
  const Coefficients lam{p.data.nu, p.data.sigma};
  const Load f{p.data.f1, p.data.f2};
  const LinearSystem a = assemble(s, lam, f, Exec::Serial);
  const LinearSystem b = assemble(s, lam, f, Exec::Parallel);
  CHECK((a.rhs - b.rhs).norm() == 0.0);
  CHECK(Eigen::MatrixXd(a.matrix - b.matrix).norm() == 0.0);
  const auto u1 = solve(s, f, lam, Exec::Serial);
  const auto u2 = solve(s, f, lam, Exec::Parallel);
  CHECK(u1.fingerprint == u2.fingerprint);
}

TEST_CASE("Galerkin orthogonality") {
  const Problem p = sine_var_problem();
  const ConformingSpace s(mixed());
  const Coefficients lam{p.data.nu, p.data.sigma};
  const Load f{p.data.f1, p.data.f2};
  const LinearSystem sys = assemble(s, lam, f);
  const GalerkinSolution u = solve(s, f, lam);
  CHECK((sys.matrix * u.coefficients - sys.rhs).norm() <= 1e-12 * sys.rhs.norm());
  // Energy of the discrete solution equals the load applied to it.
  CHECK(energy_norm_sq(u.piecewise.as_function(), lam) == doctest::Approx(u.coefficients.dot(sys.rhs)).epsilon(1e-12));
}

TEST_CASE("negative coefficients are rejected") {
  const Coefficients lam{Function::constant(-1.0), Function::constant(0.0)};
  CHECK_THROWS(solve(ConformingSpace(mixed()), Load{Function::constant(1.0), Function::zero()}, lam));
}

TEST_CASE("glued conforming approximation interpolates the vertices") {
  const Function v = *xalpha_problem(0.7).u_exact;
  const HpPartition d = mixed();
  const auto [w, err] = best_conforming_approx(v, d);
  for (double x : d.breakpoints()) CHECK(w(x) == doctest::Approx(v(x)).epsilon(1e-12));
  CHECK(err == doctest::Approx(h1_distance_sq(v, w.as_function())).epsilon(1e-12));
}
