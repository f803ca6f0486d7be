#include <doctest.h>

#include <cmath>
#include <memory>

#include "hpafem/error.hpp"
#include "hpafem/estimator_reduce.hpp"
#include "hpafem/problems.hpp"

using namespace hpafem;

namespace {
RootsPtr unit() { return std::make_shared<const RootPartition>(RootPartition::uniform(1)); }
}  // namespace

TEST_CASE("local indicator of a constant residual") {
  // -z'' = 2 on (0,1) with zero ends: z = x(1-x), |z|^2 = 1/3.
  CHECK(local_indicator(LegendreCoeffs({0.0, 1.0}, {2.0})) == doctest::Approx(1.0 / 3.0));
  CHECK(local_indicator(LegendreCoeffs({0.0, 0.5}, {2.0})) == doctest::Approx(1.0 / 24.0));
}

TEST_CASE("residual of the exact discrete solution vanishes") {
  const Problem p = poly_exact_problem();
  const HpPartition d = HpPartition::from_roots(unit(), 2);
  const DataProjection data = project_data(d, p.data);
  const GalerkinSolution u = solve(ConformingSpace(d), load_of(data), coefficients_of(data));
  const IndicatorSet ind = estimate(u, data);
  CHECK(ind.est <= 1e-13);
  CHECK(residual_poly(u, data, 0).degree() >= 0);
}

TEST_CASE("partition mismatch is reported") {
  const Problem p = poly_exact_problem();
  const HpPartition d = HpPartition::from_roots(unit(), 2);
  const DataProjection data = project_data(bisect(d, 0), p.data);
  const GalerkinSolution u = solve(ConformingSpace(d), Load{p.data.f1, p.data.f2}, Coefficients{});
  CHECK_THROWS_AS(residual_poly(u, data, 0), Error);
}

TEST_CASE("Doerfler marking picks a minimal set") {
  IndicatorSet ind;
  ind.eta2 = {1.0, 4.0, 0.5, 4.0, 0.5};
  ind.est = std::sqrt(10.0);
  CHECK(mark(ind, 0.5) == std::vector<std::size_t>{1, 3});
  CHECK(mark(ind, 0.81) == std::vector<std::size_t>{0, 1, 3});
  CHECK(mark(ind, 1.0) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  ind.eta2 = {0.0, 1.0};
  ind.est = 1.0;
  CHECK(mark(ind, 1.0) == std::vector<std::size_t>{1});
}

TEST_CASE("p-enrichment rule") {
  HpPartition d = bisect(HpPartition::from_roots(unit(), 2), 0);
  const HpPartition r = refine(d, {1}, {3, 4});
  CHECK(r[0].d == 2);
  CHECK(r[1].d == 4 + 2 + 3);
  CHECK(refines(d, r));
}

TEST_CASE("iteration count and contraction factor") {
  ReduceParams rp;
  rp.theta = 0.5;
  rp.alpha_lower = 0.25;
  rp.alpha_upper = 1.75;
  const double kappa = contraction_factor(rp);
  CHECK(kappa == doctest::Approx(std::sqrt(1.0 - 0.5 / 7.0)));
  const int m = iteration_count(0.5, rp);
  CHECK(std::sqrt(7.0) * std::pow(kappa, m) <= 0.5);
  CHECK(std::sqrt(7.0) * std::pow(kappa, m - 1) > 0.5);
  CHECK_THROWS_AS(iteration_count(3.0, rp), Error);
}

TEST_CASE("reduce meets its target on a variable-coefficient problem") {
  const Problem p = sine_var_problem();
  const HpPartition d = bisect(HpPartition::from_roots(unit(), 1), 0);
  const DataProjection data = project_data(d, p.data);
  ReduceParams rp;
  rp.alpha_lower = p.data.alpha_lower();
  rp.alpha_upper = p.data.alpha_upper();
  std::vector<HpElement> rich(d.elements().begin(), d.elements().end());
  for (auto& e : rich) e.d += 50;
  const GalerkinSolution ref = solve(ConformingSpace(HpPartition(d.roots(), rich)), load_of(data), coefficients_of(data));
  const Function reff = ref.piecewise.as_function();
  const ReduceResult r = reduce(0.3, d, data, rp, &reff);
  CHECK(refines(d, r.partition));
  CHECK(*r.trace.back().energy_error <= 0.3 * *r.trace.front().energy_error);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].dofs >= r.trace[i - 1].dofs);
}
