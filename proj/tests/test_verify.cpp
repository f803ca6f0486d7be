#include <doctest.h>

#include <cmath>

#include "hpafem/error.hpp"
#include "hpafem/verify.hpp"

using namespace hpafem;

TEST_CASE("random oracles are integer valued, subadditive and monotone in d") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RandomTreeOracle rt(seed);
    std::vector<ElementId> ks{ElementId{}};
    for (std::size_t i = 0; i < ks.size() && ks.size() < 63; ++i) {
      const auto [l, r] = ks[i].children();
      ks.push_back(l);
      ks.push_back(r);
    }
    for (const auto& k : ks) {
      const auto [l, r] = k.children();
      for (int d = 1; d <= 8; ++d) {
        const double e = rt(k, d);
        CHECK(e == std::floor(e));
        CHECK(e >= 0.0);
        CHECK(rt(l, d) + rt(r, d) <= e);
        CHECK(rt(k, d + 1) <= e);
      }
    }
  }
}

TEST_CASE("suites") {
  const auto trees = run_suite("trees");
  REQUIRE(trees.size() == 3);
  for (const auto& r : trees) CHECK_MESSAGE(r.pass, format_result(r));
  CHECK(trees[0].id == 1);
  CHECK_THROWS_AS(run_suite("nope"), Error);
  const auto est = run_suite("estimator");
  REQUIRE(est.size() == 3);
  for (const auto& r : est) CHECK_MESSAGE(r.pass, format_result(r));
  CHECK(format_result(est[0]).find("PASS") != std::string::npos);
}
