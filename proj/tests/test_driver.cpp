#include <doctest.h>

#include <cmath>
#include <memory>

#include "hpafem/driver.hpp"
#include "hpafem/error.hpp"
#include "hpafem/problems.hpp"

using namespace hpafem;

namespace {
RootsPtr unit() { return std::make_shared<const RootPartition>(RootPartition::uniform(1)); }
}  // namespace

TEST_CASE("derived parameters satisfy the admissibility conditions") {
  const Problem p = xalpha_problem(0.7);
  const AfemParams a = derive_params(p.data);
  CHECK_NOTHROW(a.check());
  CHECK(a.b == doctest::Approx(0.5));
  CHECK(a.c1 * a.c2 < a.b * (1.0 - a.mu));
  CHECK(a.omega > a.c2 / a.b);
  CHECK(a.omega < (1.0 - a.mu) / a.c1);
  CHECK(a.schedule_ratio() < 1.0);
  CHECK(a.b * a.omega - a.c2 > 0.0);
  CHECK(a.c1 == doctest::Approx(a.c_bar * std::sqrt(a.delta)));
  // ||f2||^2 = 1 - 2 + 0.49/0.4 for f2 = 1 - 0.7 x^-0.3.
  CHECK(a.c_f == doctest::Approx(std::sqrt(0.225) / 0.25).epsilon(1e-9));
  CHECK(a.eps0 == a.c_f);
}

TEST_CASE("omega interval tends to (C2/b, inf) as delta shrinks") {
  DeriveOptions o;
  o.delta = 1e-14;
  const AfemParams a = derive_params(poly_exact_problem().data, o);
  CHECK(a.c2 / a.b == doctest::Approx(2.0));
  CHECK((1.0 - a.mu) / a.c1 > 1e5);
}

TEST_CASE("parameter errors") {
  DeriveOptions o;
  o.mu = 1.5;
  CHECK_THROWS_AS(derive_params(poly_exact_problem().data, o), Error);
  o.mu = 0.5;
  o.delta = 1.0;
  try {
    derive_params(poly_exact_problem().data, o);
    FAIL("expected a parameter error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parameter);
  }
}

TEST_CASE("polynomial problem is solved exactly in the first iteration") {
  const Problem p = poly_exact_problem();
  const AfemResult r = hp_afem(p.data, unit(), derive_params(p.data), &*p.u_exact);
  REQUIRE(r.records.size() == 1);
  CHECK(r.exact);
  CHECK(*r.records[0].true_error <= 1e-13);
  CHECK_FALSE(r.failure);
}

TEST_CASE("schedule is geometric and the tolerance chain holds") {
  const Problem p = xalpha_problem(0.7);
  const AfemParams a = derive_params(p.data);
  AfemOptions o;
  o.max_iters = 6;
  const AfemResult r = hp_afem(p.data, unit(), a, &*p.u_exact, o);
  REQUIRE(r.records.size() == 6);
  double prev = a.eps0;
  for (const auto& rec : r.records) {
    CHECK(rec.eps == a.schedule_ratio() * prev);
    CHECK(*rec.true_error <= rec.eps);
    CHECK(rec.e_sqrt <= (a.omega + a.c2) * prev);
    CHECK(rec.dofs_reduce >= rec.dofs_nearbest);
    prev = rec.eps;
  }
}

TEST_CASE("decay fit") {
  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= 10; ++n) pts.emplace_back(n * 3.0, 2.0 * std::exp(-0.4 * n * 3.0));
  const DecayFit f = decay_fit(pts);
  CHECK(f.ok);
  CHECK(f.tau == 1.0);
  CHECK(f.eta == doctest::Approx(0.4).epsilon(0.01));
  CHECK(f.r2 == doctest::Approx(1.0));

  std::vector<std::pair<double, double>> flat{{1, 1e-3}, {2, 1e-3}, {3, 1e-3}, {4, 1e-3}};
  const DecayFit g = decay_fit(flat);
  CHECK_FALSE(g.ok);
  CHECK(g.r2 == 0.0);
  CHECK_FALSE(decay_fit({{1, 1.0}, {2, 0.5}, {3, 0.1}}).ok);
}
