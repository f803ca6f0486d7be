#include <doctest.h>

#include <cmath>
#include <memory>

#include "hpafem/error.hpp"
#include "hpafem/problems.hpp"
#include "hpafem/tree_approx.hpp"
#include "hpafem/verify.hpp"

using namespace hpafem;

namespace {

ErrorOracle constant_oracle() {
  return {[](const ElementId&, int) { return 1.0; }, false};
}

RootsPtr uniform_roots(std::size_t n) { return std::make_shared<const RootPartition>(RootPartition::uniform(n)); }

}  // namespace

TEST_CASE("b from B") {
  CHECK(nearbest_b(2.0) == doctest::Approx(0.5));
  CHECK(nearbest_b(4.0) == doctest::Approx(std::sqrt(0.375)));
}

TEST_CASE("modified error follows the configured rule") {
  for (auto rule : {ModifiedErrorRule::ParentModified, ModifiedErrorRule::ParentError}) {
    GhostTree t(ElementId{}, constant_oracle(), rule);
    const int root = t.root_index();
    CHECK(t.node(root).e_mod == 1.0);
    t.greedy_step();
    const int child = t.node(root).child[0];
    CHECK(t.node(child).e_mod == doctest::Approx(0.5));
    // Bisect `child` itself (ties go to the canonical first leaf).
    t.greedy_step();
    const int grandchild = t.node(child).child[0];
    REQUIRE(grandchild >= 0);
    const double expected = rule == ModifiedErrorRule::ParentModified ? 1.0 / 3.0 : 0.5;
    CHECK(t.node(grandchild).e_mod == doctest::Approx(expected));
  }
}

TEST_CASE("hp update keeps e_hp = min(whole, split) and leaf count") {
  const RandomTreeOracle rt(7);
  GhostTree t(ElementId{}, rt.oracle());
  for (int i = 0; i < 7; ++i) {
    t.greedy_step();
    CHECK(t.leaf_count() == static_cast<std::size_t>(i + 2));
    const auto els = t.extract_elements();
    long dofs = 0;
    double e = 0.0;
    for (const auto& el : els) {
      dofs += el.d;
      e += rt(el.element, el.d);
    }
    CHECK(dofs == static_cast<long>(t.leaf_count()));
    CHECK(e == t.error());
  }
}

TEST_CASE("greedy sequences meet the h-tree bound on random oracles") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RandomTreeOracle rt(seed * 7919);
    const auto orc = rt.oracle();
    const auto seq = greedy_sequence(orc, 8, true);
    for (int big_n = 1; big_n <= 8; ++big_n) {
      for (int n = 1; n <= big_n; ++n) {
        CHECK(seq[big_n - 1] * (big_n - n + 1) <= big_n * brute_force_sigma(n, orc, 8, true));
      }
    }
  }
}

TEST_CASE("hp greedy errors are non-increasing") {
  const RandomTreeOracle rt(99);
  const auto seq = greedy_sequence(rt.oracle(), 12, false);
  for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] <= seq[i - 1]);
}

TEST_CASE("brute force agrees with dynamic programming") {
  const RandomTreeOracle rt(4242);
  const auto orc = rt.oracle();
  for (int n = 1; n <= 7; ++n) {
    CHECK(brute_force_sigma(n, orc, 3, false) == dp_sigma(n, orc, 3, false));
    CHECK(brute_force_sigma(n, orc, 3, true) == dp_sigma(n, orc, 3, true));
  }
  CHECK_THROWS_AS(brute_force_sigma(12, orc, 12, false, ElementId{}, 100), Error);
}

TEST_CASE("unified tree pads odd levels with virtual nodes") {
  const auto roots = uniform_roots(3)->roots();
  UnifiedTree u(roots, constant_oracle());
  CHECK(u.root_count() == 3);
  CHECK(u.virtual_count() == 1);
  // Three real roots at degree 1 each and a virtual node of zero error.
  CHECK(u.error(u.root(), 3) == 3.0);
  CHECK(std::isinf(u.error(u.root(), 2)));
}

TEST_CASE("multi-root nearbest returns a valid partition below tolerance") {
  const RootsPtr roots = uniform_roots(3);
  const Problem p = xalpha_problem(0.7);
  ErrorFunctional ef(std::make_shared<const ProblemData>(p.data), roots, 1.0);
  ef.set_v(*p.u_exact);
  const NearBestResult r = hp_nearbest(0.05, ef);
  CHECK(r.achieved_error <= 0.05 * 0.05);
  CHECK(r.partition.roots() == roots);
  CHECK(r.partition.h_partition().size() == r.partition.size());
  CHECK(r.trace.back().e <= 0.05 * 0.05);
  // The singular end is refined hardest.
  CHECK(r.partition[0].element.level > r.partition[r.partition.size() - 1].element.level);
}

TEST_CASE("nearbest budget and stagnation") {
  const RootsPtr roots = uniform_roots(1);
  const Problem p = xalpha_problem(0.7);
  ErrorFunctional ef(std::make_shared<const ProblemData>(p.data), roots, 1.0);
  ef.set_v(*p.u_exact);
  NearBestParams np;
  np.max_n = 5;
  try {
    hp_nearbest(1e-6, ef, np);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceededError& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
    CHECK(e.trace().size() == 5);
  }
  CHECK_THROWS_AS(hp_nearbest(0.0, ef), Error);
}

TEST_CASE("lacunary target: the greedy backtracks to one high-degree element") {
  const Problem p = lacunary_problem(3);
  const RootsPtr roots = uniform_roots(1);
  ErrorFunctional ef(std::make_shared<const ProblemData>(p.data), roots, 1.0);
  ef.set_v(*p.target);
  const NearBestResult r = hp_nearbest(1e-8, ef);
  CHECK(r.partition.size() == 1);
  CHECK(r.partition[0].d == 9);
  CHECK(r.steps >= 7);
}
