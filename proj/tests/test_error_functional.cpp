#include <doctest.h>

#include <cmath>
#include <memory>

#include "hpafem/error.hpp"
#include "hpafem/error_functional.hpp"
#include "hpafem/problems.hpp"

using namespace hpafem;

namespace {

RootsPtr unit() { return std::make_shared<const RootPartition>(RootPartition::uniform(1)); }

std::shared_ptr<const ProblemData> xalpha_data() {
  return std::make_shared<const ProblemData>(xalpha_problem(0.7).data);
}

}  // namespace

TEST_CASE("e_{K,d} is non-increasing in d and subadditive under bisection") {
  ErrorFunctional ef(xalpha_data(), unit(), 1e-3);
  ef.set_v(*xalpha_problem(0.7).u_exact);
  std::vector<ElementId> ks{ElementId{}, ElementId(0, 1, 0), ElementId(0, 3, 0), ElementId(0, 2, 3)};
  for (const auto& k : ks) {
    double prev = ef.e(k, 0);
    for (int d = 1; d <= 12; ++d) {
      const double e = ef.e(k, d);
      CHECK(e <= prev * (1.0 + 1e-12));
      prev = e;
    }
    const auto [l, r] = k.children();
    for (int d = 1; d <= 6; ++d) CHECK(ef.e(l, d) + ef.e(r, d) <= ef.e(k, d) * (1.0 + 1e-12));
  }
}

TEST_CASE("local breakdown and the delta penalty") {
  ErrorFunctional ef(xalpha_data(), unit(), 0.5);
  ef.set_v(*xalpha_problem(0.7).u_exact);
  const ElementId k(0, 2, 1);
  const LocalErrorBreakdown b = ef.local(k, 3);
  CHECK(b.delta == 0.5);
  CHECK(b.total == doctest::Approx(b.e_v + b.osc2 / 0.5));
  CHECK(ef.e(k, 3) == doctest::Approx(b.total));
  CHECK(ef.v_error(k, 3) == doctest::Approx(b.e_v));
}

TEST_CASE("polynomial data have no oscillation at sufficient degree") {
  auto data = std::make_shared<const ProblemData>(poly_exact_problem().data);
  ErrorFunctional ef(data, unit(), 1e-6);
  ef.set_v(*poly_exact_problem().u_exact);
  CHECK(ef.oscillation_sq(ElementId{}, 1) == 0.0);
  CHECK(ef.e(ElementId{}, 2) == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(ef.e(ElementId{}, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("replacing v drops the v moments") {
  ErrorFunctional ef(xalpha_data(), unit(), 1.0);
  ef.set_v(Function::zero());
  const auto g0 = ef.generation();
  CHECK(ef.v_error(ElementId{}, 1) == 0.0);
  ef.set_v(*xalpha_problem(0.7).u_exact);
  CHECK(ef.generation() == g0 + 1);
  CHECK(ef.v_error(ElementId{}, 1) > 0.0);
}

TEST_CASE("global error: serial and parallel agree bitwise") {
  ErrorFunctional ef(xalpha_data(), unit(), 1e-2);
  ef.set_v(*xalpha_problem(0.7).u_exact);
  HpPartition d = HpPartition::from_roots(unit(), 3);
  for (int i = 0; i < 5; ++i) d = bisect(d, 0);
  const double s = ef.global_error(d, Exec::Serial);
  ErrorFunctional ef2(xalpha_data(), unit(), 1e-2);
  ef2.set_v(*xalpha_problem(0.7).u_exact);
  const double p = ef2.global_error(d, Exec::Parallel);
  CHECK(s == p);
  double sum = 0.0;
  for (const auto& el : d.elements()) sum += ef.e(el.element, el.d);
  CHECK(s == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("data projection and root fineness") {
  const Problem sv = sine_var_problem();
  HpPartition d = HpPartition::from_roots(unit(), 2);
  d = bisect(d, 0);
  const DataProjection proj = project_data(d, sv.data);
  CHECK(proj.data_degree == std::vector<int>{2, 2});
  CHECK(proj.f1.piece(0).degree() == 1);
  CHECK(proj.f2.piece(0).degree() == 2);
  CHECK(proj.nu.piece(0).degree() == 3);
  // nu = 1 + x is linear: its projection is exact.
  CHECK(proj.nu(0.3) == doctest::Approx(1.3));
  CHECK(validate_root_fineness(HPartition::from_roots(unit()), sv.data));

  ProblemData wild = sv.data;
  wild.nu = Function([](double x) { return 2.0 + std::sin(40.0 * x); }, [](double x) { return 40.0 * std::cos(40.0 * x); });
  wild.nu_star = 1.0;
  wild.nu_sup = 3.0;
  CHECK_FALSE(validate_root_fineness(HPartition::from_roots(unit()), wild));
}

TEST_CASE("coefficient bounds are checked") {
  ProblemData p = sine_var_problem().data;
  CHECK_NOTHROW(p.validate());
  p.nu_star = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK(sine_var_problem().data.alpha_lower() == 0.25);
  CHECK(sine_var_problem().data.alpha_upper() == doctest::Approx(2.0 + 0.5 + 0.75));
}
