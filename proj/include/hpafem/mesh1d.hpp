#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hpafem {

/// Closed interval [a, b].
struct Interval {
  double a = 0.0;
  double b = 0.0;

  double length() const { return b - a; }
  double midpoint() const { return 0.5 * (a + b); }
  bool operator==(const Interval&) const = default;
};

inline constexpr int kMaxLevel = 60;

/// Node of the dyadic master tree: the `position`-th of the 2^level dyadic
/// pieces of root `root_index`. Endpoints are never stored.
struct ElementId {
  std::uint32_t root_index = 0;
  std::uint32_t level = 0;
  std::uint64_t position = 0;

  ElementId() = default;
  ElementId(std::uint32_t root, std::uint32_t lvl, std::uint64_t pos);

  std::pair<ElementId, ElementId> children() const;
  ElementId parent() const;
  ElementId sibling() const;
  bool is_root() const { return level == 0; }
  bool is_left_child() const { return (position & 1U) == 0; }

  /// True if `*this` equals `other` or is one of its ancestors.
  bool contains(const ElementId& other) const;

  auto operator<=>(const ElementId&) const = default;
};

std::ostream& operator<<(std::ostream& os, const ElementId& id);

/// Left-endpoint order; ancestors precede their descendants.
bool canonical_less(const ElementId& x, const ElementId& y);

struct ElementIdHash {
  std::size_t operator()(const ElementId& id) const noexcept;
};

/// The user-given partition of [0,1] into root intervals.
class RootPartition {
 public:
  /// `breaks` must be strictly increasing, start at 0 and end at 1.
  explicit RootPartition(std::vector<double> breaks);

  static RootPartition uniform(std::size_t count);

  std::size_t size() const { return breaks_.size() - 1; }
  std::span<const double> breaks() const { return breaks_; }
  Interval root_interval(std::size_t r) const { return {breaks_[r], breaks_[r + 1]}; }

  /// Endpoints of a master-tree node, computed from the integer address.
  Interval interval(const ElementId& id) const;

  std::vector<ElementId> roots() const;

  bool operator==(const RootPartition&) const = default;

 private:
  std::vector<double> breaks_;
};

using RootsPtr = std::shared_ptr<const RootPartition>;

/// Set of master-tree leaves tiling [0,1], kept in left-endpoint order.
class HPartition {
 public:
  HPartition(RootsPtr roots, std::vector<ElementId> leaves);

  static HPartition from_roots(RootsPtr roots);

  const RootsPtr& roots() const { return roots_; }
  std::span<const ElementId> leaves() const { return leaves_; }
  std::size_t size() const { return leaves_.size(); }
  Interval interval(std::size_t i) const { return roots_->interval(leaves_[i]); }

  /// Throws InvalidPartition unless the leaves tile [0,1] without gaps,
  /// overlaps or nested pairs.
  void validate() const;

 private:
  RootsPtr roots_;
  std::vector<ElementId> leaves_;
};

/// hp-element D = (K_D, d_D). In 1D the polynomial degree equals d.
struct HpElement {
  ElementId element;
  int d = 1;

  int degree() const { return d; }
  bool operator==(const HpElement&) const = default;
};

class HpPartition {
 public:
  HpPartition(RootsPtr roots, std::vector<HpElement> elements);

  /// Every root with the same degree.
  static HpPartition from_roots(RootsPtr roots, int d = 1);

  const RootsPtr& roots() const { return roots_; }
  std::span<const HpElement> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const HpElement& operator[](std::size_t i) const { return elements_[i]; }
  Interval interval(std::size_t i) const { return roots_->interval(elements_[i].element); }

  HPartition h_partition() const;

  /// Sorted element endpoints: 0 = x_0 < ... < x_n = 1.
  std::vector<double> breakpoints() const;

  /// Index of the element with the given domain, or -1.
  std::ptrdiff_t find(const ElementId& id) const;

  int max_degree() const;

  bool operator==(const HpPartition& other) const;

 private:
  RootsPtr roots_;
  std::vector<HpElement> elements_;
};

/// #D = sum of d_D.
long total_dof(const HpPartition& d);

/// True iff `fine` is a refinement of `coarse`: every element of `fine` lies
/// in an element of `coarse` whose degree does not exceed its own.
bool refines(const HpPartition& coarse, const HpPartition& fine);

HpPartition bisect(const HpPartition& d, std::size_t index);
HpPartition raise_degree(const HpPartition& d, std::size_t index, int increment = 1);

/// One line per element: "root level position degree".
std::string serialize(const HpPartition& d);
HpPartition deserialize_partition(const std::string& text, RootsPtr roots);

}  // namespace hpafem
