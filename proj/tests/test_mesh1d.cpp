#include <doctest.h>

#include <algorithm>
#include <memory>

#include "hpafem/error.hpp"
#include "hpafem/mesh1d.hpp"

using namespace hpafem;

namespace {
RootsPtr unit() { return std::make_shared<const RootPartition>(RootPartition::uniform(1)); }
}  // namespace

TEST_CASE("element ids: children, parent, sibling, containment") {
  const ElementId root;
  const auto [l, r] = root.children();
  CHECK(l.level == 1);
  CHECK(l.position == 0);
  CHECK(r.position == 1);
  CHECK(l.parent() == root);
  CHECK(l.sibling() == r);
  CHECK(root.contains(r.children().second));
  CHECK_FALSE(l.contains(r));
  CHECK(l.is_left_child());
}

TEST_CASE("level cap is a hard error") {
  CHECK_NOTHROW(ElementId(0, 60, 0));
  try {
    ElementId(0, 61, 0);
    FAIL("expected LevelOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LevelOverflow);
  }
  ElementId deep(0, 60, 5);
  CHECK_THROWS_AS(deep.children(), Error);
}

TEST_CASE("canonical order: root, then left endpoint, ancestors first") {
  const ElementId root;
  const auto [l, r] = root.children();
  const auto [ll, lr] = l.children();
  std::vector<ElementId> v{r, lr, ll, root, l};
  std::sort(v.begin(), v.end(), canonical_less);
  CHECK(v == std::vector<ElementId>{root, l, ll, lr, r});
  CHECK(canonical_less(ElementId(0, 3, 7), ElementId(1, 0, 0)));
}

TEST_CASE("intervals use exact dyadic endpoints") {
  const RootPartition roots({0.0, 0.25, 1.0});
  const ElementId k(1, 2, 3);
  const Interval iv = roots.interval(k);
  CHECK(iv.a == doctest::Approx(0.25 + 0.75 * 0.75));
  CHECK(iv.b == 1.0);
  CHECK(roots.interval(ElementId(0, 1, 1)).a == 0.125);
}

TEST_CASE("hp partitions validate tiling and degrees") {
  const RootsPtr roots = unit();
  const auto [l, r] = ElementId{}.children();
  CHECK_NOTHROW(HpPartition(roots, {{l, 2}, {r, 3}}));
  CHECK_THROWS_AS(HpPartition(roots, {{l, 2}}), Error);
  CHECK_THROWS_AS(HpPartition(roots, {{l, 2}, {ElementId{}, 1}}), Error);
  CHECK_THROWS_AS(HpPartition(roots, {{l, 0}, {r, 1}}), Error);
  const HpPartition d(roots, {{r, 3}, {l, 2}});
  CHECK(d[0].element == l);
  CHECK(total_dof(d) == 5);
  CHECK(d.max_degree() == 3);
  CHECK(d.breakpoints() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(d.find(r) == 1);
  CHECK(d.find(ElementId{}) == -1);
}

TEST_CASE("refinement order") {
  const RootsPtr roots = unit();
  const HpPartition coarse = HpPartition::from_roots(roots, 2);
  const HpPartition split = bisect(coarse, 0);
  CHECK(refines(coarse, split));
  CHECK(refines(coarse, coarse));
  CHECK_FALSE(refines(split, coarse));
  const HpPartition raised = raise_degree(split, 1, 2);
  CHECK(refines(split, raised));
  const HpPartition lowered(roots, {{split[0].element, 1}, {split[1].element, 2}});
  CHECK_FALSE(refines(coarse, lowered));
  const RootsPtr other = std::make_shared<const RootPartition>(RootPartition::uniform(2));
  CHECK_THROWS_AS(refines(coarse, HpPartition::from_roots(other)), Error);
}

TEST_CASE("serialization round-trips") {
  const RootsPtr roots = std::make_shared<const RootPartition>(RootPartition::uniform(3));
  HpPartition d = HpPartition::from_roots(roots, 1);
  d = bisect(d, 1);
  d = raise_degree(d, 2, 4);
  const std::string text = serialize(d);
  CHECK(deserialize_partition(text, roots) == d);
  CHECK_THROWS_AS(deserialize_partition("0 0 0", roots), Error);
}
