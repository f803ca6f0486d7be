#include "hpafem/tree_approx.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "hpafem/error.hpp"

namespace hpafem {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ErrorOracle make_oracle(ErrorFunctional& ef) {
  return ErrorOracle{[&ef](const ElementId& k, int d) { return ef.e(k, d); }, true};
}

UnifiedTree::UnifiedTree(std::vector<ElementId> roots, ErrorOracle oracle)
    : roots_(std::move(roots)), oracle_(std::move(oracle)) {
  if (roots_.empty()) throw Error(ErrorKind::InvalidPartition, "no roots to unify");
  std::vector<NodeKey> level;
  for (const auto& r : roots_) level.push_back(NodeKey{-1, r});
  while (level.size() > 1) {
    if (level.size() % 2 == 1) {
      synthetic_.push_back({Kind::Virtual, {}});
      level.push_back(NodeKey{static_cast<std::int32_t>(synthetic_.size() - 1), {}});
    }
    std::vector<NodeKey> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      synthetic_.push_back({Kind::Union, {level[i], level[i + 1]}});
      next.push_back(NodeKey{static_cast<std::int32_t>(synthetic_.size() - 1), {}});
    }
    level = std::move(next);
  }
  root_ = level.front();
}

std::size_t UnifiedTree::virtual_count() const {
  return static_cast<std::size_t>(
      std::count_if(synthetic_.begin(), synthetic_.end(), [](const Synthetic& s) { return s.kind == Kind::Virtual; }));
}

double UnifiedTree::error(const NodeKey& k, int d) {
  if (!k.is_synthetic()) {
    if (d == 0 && !oracle_.supports_zero) return kInf;
    return oracle_(k.element, d);
  }
  if (synthetic_[k.synthetic].kind == Kind::Virtual) return 0.0;
  return best(k.synthetic, d).value;
}

const UnifiedTree::Best& UnifiedTree::best(std::int32_t s, int d) {
  const std::int64_t key = (static_cast<std::int64_t>(s) << 32) | static_cast<std::uint32_t>(d);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const Synthetic node = synthetic_[s];
  Best b{kInf, 0};
  for (int left = 0; left <= d; ++left) {
    const double v = error(node.child[0], left) + error(node.child[1], d - left);
    if (v < b.value) b = {v, left};
  }
  if (d > 0) {
    const Best lower = best(s, d - 1);
    if (lower.value <= b.value) b = lower;
  }
  return memo_.emplace(key, b).first->second;
}

std::pair<int, int> UnifiedTree::split(std::int32_t s, int d) {
  // Walk down to the degree whose exact split attains the minimum.
  int dd = d;
  while (dd > 0 && best(s, dd - 1).value <= best(s, dd).value) --dd;
  const Best& b = best(s, dd);
  return {b.left, dd - b.left};
}

bool GhostTree::QueueLess::operator()(int x, int y) const {
  const Node& a = (*nodes)[x];
  const Node& b = (*nodes)[y];
  if (a.e_mod != b.e_mod) return a.e_mod > b.e_mod;
  if (canonical_less(a.key.element, b.key.element)) return true;
  if (canonical_less(b.key.element, a.key.element)) return false;
  return x < y;
}

GhostTree::GhostTree(ElementId root, ErrorOracle oracle, ModifiedErrorRule rule)
    : oracle_(std::move(oracle)), rule_(rule), queue_(QueueLess{&nodes_}) {
  init({root});
}

GhostTree::GhostTree(std::vector<ElementId> roots, ErrorOracle oracle, ModifiedErrorRule rule)
    : oracle_(std::move(oracle)), rule_(rule), queue_(QueueLess{&nodes_}) {
  init(std::move(roots));
}

void GhostTree::init(std::vector<ElementId> roots) {
  if (roots.empty()) throw Error(ErrorKind::InvalidPartition, "ghost tree needs a root");
  if (roots.size() == 1) {
    root_ = add_real(roots.front(), -1, 0);
    return;
  }
  unified_ = std::make_unique<UnifiedTree>(roots, oracle_);
  root_ = add_synthetic(unified_->root().synthetic, -1, 0);
}

int GhostTree::add_real(const ElementId& id, int parent, int depth) {
  Node n;
  n.key = NodeKey{-1, id};
  n.parent = parent;
  n.depth = depth;
  n.e1 = oracle_(id, 1);
  if (parent < 0 || nodes_[parent].key.is_synthetic()) {
    n.e_mod = n.e1;
  } else if (n.e1 == 0.0) {
    n.e_mod = 0.0;
  } else {
    const Node& p = nodes_[parent];
    const double ref = rule_ == ModifiedErrorRule::ParentModified ? p.e_mod : p.e1;
    n.e_mod = ref > 0.0 ? 1.0 / (1.0 / n.e1 + 1.0 / ref) : 0.0;
  }
  n.d_count = 1;
  n.e_hp = n.e1;
  nodes_.push_back(n);
  const int idx = static_cast<int>(nodes_.size() - 1);
  ++leaves_;
  if (n.e_mod > 0.0) queue_.insert(idx);
  return idx;
}

int GhostTree::add_synthetic(std::int32_t s, int parent, int depth) {
  Node n;
  n.key = NodeKey{s, {}};
  n.parent = parent;
  n.depth = depth;
  nodes_.push_back(n);
  const int idx = static_cast<int>(nodes_.size() - 1);
  const auto& syn = unified_->synthetic()[s];
  if (syn.kind == UnifiedTree::Kind::Virtual) {
    nodes_[idx].d_count = 0;
    nodes_[idx].e_hp = 0.0;
    return idx;
  }
  for (int c = 0; c < 2; ++c) {
    const NodeKey ck = syn.child[c];
    const int ci = ck.is_synthetic() ? add_synthetic(ck.synthetic, idx, depth + 1) : add_real(ck.element, idx, depth + 1);
    nodes_[idx].child[c] = ci;
  }
  refresh(idx);
  return idx;
}

double GhostTree::node_error(const Node& n, int d) {
  if (n.key.is_synthetic()) return unified_->error(n.key, d);
  return oracle_(n.key.element, d);
}

void GhostTree::refresh(int i) {
  Node& n = nodes_[i];
  if (n.is_leaf()) return;
  const Node& a = nodes_[n.child[0]];
  const Node& b = nodes_[n.child[1]];
  const int d = a.d_count + b.d_count;
  const double split = a.e_hp + b.e_hp;
  const double whole = node_error(n, d);
  Node& m = nodes_[i];
  m.d_count = d;
  if (whole <= split) {
    m.e_hp = whole;
    m.trimmed = true;
  } else {
    m.e_hp = split;
    m.trimmed = false;
  }
}

int GhostTree::greedy_step() {
  if (queue_.empty()) throw Error(ErrorKind::Stagnation, "no leaf with positive modified error");
  const int leaf = *queue_.begin();
  queue_.erase(queue_.begin());
  const ElementId id = nodes_[leaf].key.element;
  const auto [left, right] = id.children();
  const int depth = nodes_[leaf].depth + 1;
  const int l = add_real(left, leaf, depth);
  const int r = add_real(right, leaf, depth);
  nodes_[leaf].child[0] = l;
  nodes_[leaf].child[1] = r;
  --leaves_;
  hp_update(leaf);
  return leaf;
}

void GhostTree::hp_update(int leaf) {
  last_updates_ = 0;
  for (int i = leaf; i >= 0; i = nodes_[i].parent) {
    refresh(i);
    ++last_updates_;
  }
}

std::vector<ElementId> GhostTree::leaves() const {
  std::vector<ElementId> out;
  for (const auto& n : nodes_) {
    if (n.is_leaf() && !n.key.is_synthetic()) out.push_back(n.key.element);
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

void GhostTree::expand(const NodeKey& k, int d, std::vector<HpElement>& out) {
  if (!k.is_synthetic()) {
    out.push_back({k.element, std::max(d, 1)});
    return;
  }
  const auto& syn = unified_->synthetic()[k.synthetic];
  if (syn.kind == UnifiedTree::Kind::Virtual) return;
  const auto [dl, dr] = unified_->split(k.synthetic, d);
  expand(syn.child[0], dl, out);
  expand(syn.child[1], dr, out);
}

void GhostTree::collect(int i, std::vector<HpElement>& out) {
  const Node& n = nodes_[i];
  if (n.is_leaf()) {
    if (!n.key.is_synthetic()) out.push_back({n.key.element, 1});
    return;
  }
  if (n.trimmed) {
    expand(n.key, n.d_count, out);
    return;
  }
  collect(n.child[0], out);
  collect(n.child[1], out);
}

std::vector<HpElement> GhostTree::extract_elements() {
  std::vector<HpElement> out;
  collect(root_, out);
  std::sort(out.begin(), out.end(),
            [](const HpElement& x, const HpElement& y) { return canonical_less(x.element, y.element); });
  return out;
}

HpPartition GhostTree::extract(const RootsPtr& roots) { return HpPartition(roots, extract_elements()); }

long GhostTree::num_trimmed() const {
  long count = 0;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const Node& n = nodes_[i];
    if (n.is_leaf()) continue;
    if (n.trimmed) {
      ++count;
      continue;
    }
    stack.push_back(n.child[0]);
    stack.push_back(n.child[1]);
  }
  return count;
}

int GhostTree::max_trimmed_degree() const {
  int m = 0;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const Node& n = nodes_[i];
    if (n.is_leaf()) {
      if (!n.key.is_synthetic()) m = std::max(m, 1);
      continue;
    }
    if (n.trimmed) {
      m = std::max(m, n.d_count);
      continue;
    }
    stack.push_back(n.child[0]);
    stack.push_back(n.child[1]);
  }
  return m;
}

double nearbest_b(double big_b) {
  if (!(big_b > 1.0)) throw Error(ErrorKind::Parameter, "B must exceed 1");
  return std::sqrt(0.5 * (1.0 - 1.0 / big_b));
}

NearBestResult hp_nearbest(double eps, ErrorFunctional& ef, const NearBestParams& params) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Parameter, "nearbest tolerance must be positive");
  GhostTree tree(ef.roots()->roots(), make_oracle(ef), params.rule);
  const double target = eps * eps;
  std::vector<TraceRow> trace;
  long steps = 0;
  while (true) {
    const double e = tree.error();
    if (params.trace) {
      trace.push_back({static_cast<long>(tree.leaf_count()), e, tree.num_trimmed(), tree.max_trimmed_degree()});
    }
    if (e <= target) break;
    if (static_cast<long>(tree.leaf_count()) >= params.max_n) {
      throw BudgetExceededError(
          fmt::format("nearbest: {} leaves reached with E^(1/2) = {:.6e} > eps = {:.6e}", tree.leaf_count(),
                      std::sqrt(e), eps),
          std::move(trace));
    }
    if (!tree.can_grow()) {
      throw Error(ErrorKind::Stagnation,
                  fmt::format("nearbest: every leaf has zero modified error but E^(1/2) = {:.6e} > eps = {:.6e}",
                              std::sqrt(e), eps));
    }
    tree.greedy_step();
    ++steps;
  }
  auto elements = tree.extract_elements();
  for (auto& el : elements) el.d = std::min(el.d, ef.max_degree());
  NearBestResult out{HpPartition(ef.roots(), std::move(elements)), 0.0, {}, std::move(trace), steps};
  out.achieved_error = ef.global_error(out.partition);
  out.data = project_data(out.partition, ef.data());
  return out;
}

std::vector<double> greedy_sequence(const ErrorOracle& oracle, int max_n, bool h_only, ModifiedErrorRule rule,
                                    ElementId root) {
  GhostTree tree(root, oracle, rule);
  std::vector<double> seq;
  auto current = [&]() {
    if (!h_only) return tree.error();
    double s = 0.0;
    for (const auto& id : tree.leaves()) s += oracle(id, 1);
    return s;
  };
  while (static_cast<int>(seq.size()) < max_n) {
    seq.push_back(current());
    if (static_cast<int>(seq.size()) == max_n) break;
    if (!tree.can_grow()) {
      while (static_cast<int>(seq.size()) < max_n) seq.push_back(seq.back());
      break;
    }
    tree.greedy_step();
  }
  return seq;
}

namespace {

struct Enumerator {
  int depth_cap;
  bool h_only;
  long max_candidates;
  long candidates = 0;
  std::vector<std::pair<ElementId, int>> pending;  // element, relative depth
  std::vector<HpElement> current;

  template <class Leaf>
  void run(int budget, Leaf&& leaf) {
    if (pending.empty()) {
      if (++candidates > max_candidates) {
        throw Error(ErrorKind::CombinatorialBudget,
                    fmt::format("exhaustive search exceeded {} candidate partitions", max_candidates));
      }
      leaf(current);
      return;
    }
    const auto [k, depth] = pending.back();
    pending.pop_back();
    const int others = static_cast<int>(pending.size());
    const int top = h_only ? std::min(1, budget - others) : budget - others;
    for (int d = 1; d <= top; ++d) {
      current.push_back({k, d});
      run(budget - d, leaf);
      current.pop_back();
    }
    if (depth < depth_cap && budget >= others + 2) {
      const auto [a, b] = k.children();
      pending.push_back({b, depth + 1});
      pending.push_back({a, depth + 1});
      run(budget, leaf);
      pending.pop_back();
      pending.pop_back();
    }
    pending.push_back({k, depth});
  }
};

}  // namespace

void enumerate_partitions(const std::vector<ElementId>& roots, int n, int depth_cap, bool h_only,
                          const std::function<void(const std::vector<HpElement>&)>& fn, long max_candidates) {
  Enumerator en{depth_cap, h_only, max_candidates, 0, {}, {}};
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) en.pending.push_back({*it, 0});
  if (static_cast<int>(roots.size()) > n) return;
  en.run(n, fn);
}

double brute_force_sigma(int n, const ErrorOracle& oracle, int depth_cap, bool h_only, ElementId root,
                         long max_candidates) {
  if (n < 1) throw Error(ErrorKind::Parameter, "sigma_n needs n >= 1");
  double best = kInf;
  enumerate_partitions(
      {root}, n, depth_cap, h_only,
      [&](const std::vector<HpElement>& els) {
        double s = 0.0;
        for (const auto& el : els) s += oracle(el.element, el.d);
        best = std::min(best, s);
      },
      max_candidates);
  return best;
}

}  // namespace hpafem
