#include "hpafem/mesh1d.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <sstream>

#include "hpafem/error.hpp"

namespace hpafem {

namespace {

using u128 = unsigned __int128;

u128 scaled_left(const ElementId& id, std::uint32_t level) {
  return static_cast<u128>(id.position) << (level - id.level);
}

void check_level(std::uint64_t level) {
  if (level > static_cast<std::uint64_t>(kMaxLevel)) {
    throw Error(ErrorKind::LevelOverflow,
                fmt::format("element level {} exceeds the maximum level {}", level, kMaxLevel));
  }
}

}  // namespace

ElementId::ElementId(std::uint32_t root, std::uint32_t lvl, std::uint64_t pos)
    : root_index(root), level(lvl), position(pos) {
  check_level(lvl);
  if (lvl < 64 && pos >= (std::uint64_t{1} << lvl)) {
    throw Error(ErrorKind::InvalidPartition,
                fmt::format("position {} out of range at level {}", pos, lvl));
  }
}

std::pair<ElementId, ElementId> ElementId::children() const {
  check_level(std::uint64_t{level} + 1);
  return {ElementId(root_index, level + 1, 2 * position),
          ElementId(root_index, level + 1, 2 * position + 1)};
}

ElementId ElementId::parent() const {
  if (level == 0) throw Error(ErrorKind::InvalidPartition, "a root has no parent");
  return ElementId(root_index, level - 1, position >> 1);
}

ElementId ElementId::sibling() const {
  if (level == 0) throw Error(ErrorKind::InvalidPartition, "a root has no sibling");
  return ElementId(root_index, level, position ^ 1U);
}

bool ElementId::contains(const ElementId& other) const {
  if (root_index != other.root_index || level > other.level) return false;
  return (other.position >> (other.level - level)) == position;
}

bool canonical_less(const ElementId& x, const ElementId& y) {
  if (x.root_index != y.root_index) return x.root_index < y.root_index;
  const std::uint32_t lvl = std::max(x.level, y.level);
  const u128 lx = scaled_left(x, lvl);
  const u128 ly = scaled_left(y, lvl);
  if (lx != ly) return lx < ly;
  return x.level < y.level;
}

std::ostream& operator<<(std::ostream& os, const ElementId& id) {
  return os << '(' << id.root_index << ',' << id.level << ',' << id.position << ')';
}

std::size_t ElementIdHash::operator()(const ElementId& id) const noexcept {
  std::uint64_t h = id.position * 0x9E3779B97F4A7C15ULL;
  h ^= (static_cast<std::uint64_t>(id.root_index) << 8 | id.level) + 0x7F4A7C159E3779B9ULL +
       (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

RootPartition::RootPartition(std::vector<double> breaks) : breaks_(std::move(breaks)) {
  if (breaks_.size() < 2 || breaks_.front() != 0.0 || breaks_.back() != 1.0) {
    throw Error(ErrorKind::InvalidPartition, "root breakpoints must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > breaks_[i - 1])) {
      throw Error(ErrorKind::InvalidPartition, "root breakpoints must be strictly increasing");
    }
  }
}

RootPartition RootPartition::uniform(std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidPartition, "need at least one root");
  std::vector<double> b(count + 1);
  for (std::size_t i = 0; i <= count; ++i) b[i] = static_cast<double>(i) / static_cast<double>(count);
  b.back() = 1.0;
  return RootPartition(std::move(b));
}

Interval RootPartition::interval(const ElementId& id) const {
  if (id.root_index >= size()) {
    throw Error(ErrorKind::ConfigurationMismatch,
                fmt::format("root index {} outside a partition of {} roots", id.root_index, size()));
  }
  const double a = breaks_[id.root_index];
  const double b = breaks_[id.root_index + 1];
  const double len = b - a;
  const int l = static_cast<int>(id.level);
  const double left = id.position == 0 ? a : a + len * std::ldexp(static_cast<double>(id.position), -l);
  const bool last = l < 64 && id.position + 1 == (std::uint64_t{1} << l);
  const double right = last ? b : a + len * std::ldexp(static_cast<double>(id.position + 1), -l);
  return {left, right};
}

std::vector<ElementId> RootPartition::roots() const {
  std::vector<ElementId> out;
  out.reserve(size());
  for (std::size_t r = 0; r < size(); ++r) out.emplace_back(static_cast<std::uint32_t>(r), 0, 0);
  return out;
}

namespace {

void validate_tiling(const RootPartition& roots, std::span<const ElementId> sorted) {
  if (sorted.empty()) throw Error(ErrorKind::InvalidPartition, "partition is empty");
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].contains(sorted[i + 1])) {
      throw Error(ErrorKind::InvalidPartition, "a leaf is an ancestor of another leaf");
    }
  }
  double x = 0.0;
  for (const auto& id : sorted) {
    const Interval iv = roots.interval(id);
    if (std::abs(iv.a - x) >= 1e-14) {
      throw Error(ErrorKind::InvalidPartition,
                  fmt::format("gap or overlap at x = {} (next element starts at {})", x, iv.a));
    }
    x = iv.b;
  }
  if (std::abs(x - 1.0) >= 1e-14) {
    throw Error(ErrorKind::InvalidPartition, "leaves do not cover [0,1]");
  }
}

}  // namespace

HPartition::HPartition(RootsPtr roots, std::vector<ElementId> leaves)
    : roots_(std::move(roots)), leaves_(std::move(leaves)) {
  std::sort(leaves_.begin(), leaves_.end(), canonical_less);
  validate();
}

HPartition HPartition::from_roots(RootsPtr roots) {
  auto ids = roots->roots();
  return HPartition(std::move(roots), std::move(ids));
}

void HPartition::validate() const { validate_tiling(*roots_, leaves_); }

HpPartition::HpPartition(RootsPtr roots, std::vector<HpElement> elements)
    : roots_(std::move(roots)), elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end(),
            [](const HpElement& x, const HpElement& y) { return canonical_less(x.element, y.element); });
  for (const auto& e : elements_) {
    if (e.d < 1) throw Error(ErrorKind::InvalidPartition, "element degree must be at least 1");
  }
  std::vector<ElementId> ids;
  ids.reserve(elements_.size());
  for (const auto& e : elements_) ids.push_back(e.element);
  validate_tiling(*roots_, ids);
}

HpPartition HpPartition::from_roots(RootsPtr roots, int d) {
  std::vector<HpElement> els;
  for (const auto& id : roots->roots()) els.push_back({id, d});
  return HpPartition(std::move(roots), std::move(els));
}

HPartition HpPartition::h_partition() const {
  std::vector<ElementId> ids;
  ids.reserve(elements_.size());
  for (const auto& e : elements_) ids.push_back(e.element);
  return HPartition(roots_, std::move(ids));
}

std::vector<double> HpPartition::breakpoints() const {
  std::vector<double> x;
  x.reserve(elements_.size() + 1);
  x.push_back(0.0);
  for (std::size_t i = 0; i < elements_.size(); ++i) x.push_back(interval(i).b);
  x.back() = 1.0;
  return x;
}

std::ptrdiff_t HpPartition::find(const ElementId& id) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), id,
                             [](const HpElement& e, const ElementId& k) { return canonical_less(e.element, k); });
  if (it != elements_.end() && it->element == id) return it - elements_.begin();
  return -1;
}

int HpPartition::max_degree() const {
  int m = 0;
  for (const auto& e : elements_) m = std::max(m, e.d);
  return m;
}

bool HpPartition::operator==(const HpPartition& other) const {
  return *roots_ == *other.roots_ && elements_ == other.elements_;
}

long total_dof(const HpPartition& d) {
  long n = 0;
  for (const auto& e : d.elements()) n += e.d;
  return n;
}

bool refines(const HpPartition& coarse, const HpPartition& fine) {
  if (!(*coarse.roots() == *fine.roots())) {
    throw Error(ErrorKind::ConfigurationMismatch, "partitions use different root configurations");
  }
  const auto c = coarse.elements();
  std::size_t j = 0;
  for (const auto& f : fine.elements()) {
    while (j < c.size() && !c[j].element.contains(f.element)) {
      if (canonical_less(f.element, c[j].element)) return false;
      ++j;
    }
    if (j == c.size()) return false;
    if (f.d < c[j].d) return false;
  }
  return true;
}

HpPartition bisect(const HpPartition& d, std::size_t index) {
  std::vector<HpElement> els(d.elements().begin(), d.elements().end());
  const HpElement e = els.at(index);
  const auto [left, right] = e.element.children();
  els[index] = {left, e.d};
  els.insert(els.begin() + static_cast<std::ptrdiff_t>(index) + 1, HpElement{right, e.d});
  return HpPartition(d.roots(), std::move(els));
}

HpPartition raise_degree(const HpPartition& d, std::size_t index, int increment) {
  std::vector<HpElement> els(d.elements().begin(), d.elements().end());
  els.at(index).d += increment;
  return HpPartition(d.roots(), std::move(els));
}

std::string serialize(const HpPartition& d) {
  std::string out;
  for (const auto& e : d.elements()) {
    out += fmt::format("{} {} {} {}\n", e.element.root_index, e.element.level, e.element.position, e.d);
  }
  return out;
}

HpPartition deserialize_partition(const std::string& text, RootsPtr roots) {
  std::istringstream in(text);
  std::string line;
  std::vector<HpElement> els;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::uint64_t r = 0, l = 0, k = 0;
    long deg = 0;
    if (!(ls >> r >> l >> k >> deg)) {
      throw Error(ErrorKind::Parse, fmt::format("partition line {}: expected 'root level position degree'", lineno));
    }
    check_level(l);
    els.push_back({ElementId(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(l), k),
                   static_cast<int>(deg)});
  }
  return HpPartition(std::move(roots), std::move(els));
}

}  // namespace hpafem
