#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hpafem/error.hpp"
#include "hpafem/error_functional.hpp"
#include "hpafem/mesh1d.hpp"

namespace hpafem {

/// e_{K,d} on the dyadic master tree. Assumed subadditive under bisection at
/// fixed d and non-increasing in d. d = 0 is queried only when
/// `supports_zero` is set.
struct ErrorOracle {
  std::function<double(const ElementId&, int)> e;
  bool supports_zero = false;

  double operator()(const ElementId& k, int d) const { return e(k, d); }
};

ErrorOracle make_oracle(ErrorFunctional& ef);

/// Node of the unified tree: a real master-tree element, or a synthetic
/// union/virtual node identified by a non-negative index.
struct NodeKey {
  std::int32_t synthetic = -1;
  ElementId element;

  bool is_synthetic() const { return synthetic >= 0; }
  bool operator==(const NodeKey&) const = default;
};

/// Pairwise unification of R roots into one binary tree. Odd levels are
/// padded with a virtual node of zero error.
class UnifiedTree {
 public:
  enum class Kind { Union, Virtual };

  struct Synthetic {
    Kind kind = Kind::Union;
    NodeKey child[2];
  };

  UnifiedTree(std::vector<ElementId> roots, ErrorOracle oracle);

  NodeKey root() const { return root_; }
  std::size_t root_count() const { return roots_.size(); }
  const std::vector<Synthetic>& synthetic() const { return synthetic_; }
  std::size_t virtual_count() const;
  const ErrorOracle& base_oracle() const { return oracle_; }

  /// Extended functional. Union nodes: min over d' + d'' <= d of
  /// e_{X,d'} + e_{Y,d''}; virtual nodes: 0.
  double error(const NodeKey& k, int d);
  /// Minimizing (d', d'') for a union node.
  std::pair<int, int> split(std::int32_t synthetic, int d);

 private:
  struct Best {
    double value;
    int left;
  };
  const Best& best(std::int32_t synthetic, int d);

  std::vector<ElementId> roots_;
  ErrorOracle oracle_;
  std::vector<Synthetic> synthetic_;
  NodeKey root_;
  std::unordered_map<std::int64_t, Best> memo_;
};

enum class ModifiedErrorRule {
  /// 1/e~_K = 1/e_K + 1/e~_{parent}.
  ParentModified,
  /// 1/e~_K = 1/e_K + 1/e_{parent}.
  ParentError,
};

struct TraceRow {
  long n = 0;
  double e = 0.0;
  long num_trimmed = 0;
  int max_d = 0;
};

/// Ghost tree of the hp greedy. Grows by the harmonic-mean h-greedy on
/// e_{K,1} and keeps the trimmed hp error e_K(T) along the way.
class GhostTree {
 public:
  struct Node {
    NodeKey key;
    int parent = -1;
    int child[2] = {-1, -1};
    int depth = 0;
    double e1 = 0.0;
    double e_mod = 0.0;
    int d_count = 1;
    double e_hp = 0.0;
    bool trimmed = false;

    bool is_leaf() const { return child[0] < 0; }
  };

  /// Single root.
  GhostTree(ElementId root, ErrorOracle oracle, ModifiedErrorRule rule = ModifiedErrorRule::ParentModified);
  /// Several roots, unified.
  GhostTree(std::vector<ElementId> roots, ErrorOracle oracle,
            ModifiedErrorRule rule = ModifiedErrorRule::ParentModified);

  std::size_t leaf_count() const { return leaves_; }
  double error() const { return nodes_[root_].e_hp; }
  const Node& node(int i) const { return nodes_[i]; }
  int root_index() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }

  /// False if every leaf has e~ = 0.
  bool can_grow() const { return !queue_.empty(); }

  /// Bisects the leaf with largest e~ (ties: canonical order), then runs
  /// hp_update on its ancestry. Returns the bisected node index.
  int greedy_step();

  /// Recomputes d_count, e_hp and trim flags from `leaf` up to the root.
  void hp_update(int leaf);

  /// The h-partition of the current leaves.
  std::vector<ElementId> leaves() const;

  /// hp-partition of the trimmed tree.
  HpPartition extract(const RootsPtr& roots);
  /// Same, as element list, without requiring a RootPartition.
  std::vector<HpElement> extract_elements();

  long num_trimmed() const;
  int max_trimmed_degree() const;

  /// Node updates performed by the last hp_update.
  int last_update_count() const { return last_updates_; }

 private:
  struct QueueLess {
    const std::vector<Node>* nodes;
    bool operator()(int x, int y) const;
  };

  void init(std::vector<ElementId> roots);
  int add_real(const ElementId& id, int parent, int depth);
  int add_synthetic(std::int32_t s, int parent, int depth);
  double node_error(const Node& n, int d);
  void refresh(int i);
  void expand(const NodeKey& k, int d, std::vector<HpElement>& out);
  void collect(int i, std::vector<HpElement>& out);

  ErrorOracle oracle_;
  ModifiedErrorRule rule_;
  std::unique_ptr<UnifiedTree> unified_;
  std::vector<Node> nodes_;
  int root_ = 0;
  std::size_t leaves_ = 0;
  std::set<int, QueueLess> queue_;
  int last_updates_ = 0;
};

/// BudgetExceeded with the greedy history up to the failure.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& what, std::vector<TraceRow> trace)
      : Error(ErrorKind::BudgetExceeded, what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

struct NearBestParams {
  long max_n = 100000;
  ModifiedErrorRule rule = ModifiedErrorRule::ParentModified;
  bool trace = true;
};

struct NearBestResult {
  HpPartition partition;
  double achieved_error = 0.0;
  DataProjection data;
  std::vector<TraceRow> trace;
  long steps = 0;
};

/// b = sqrt((1 - 1/B)/2).
double nearbest_b(double big_b);

/// First partition of the greedy sequence with E^{1/2} <= eps. The returned
/// error is recomputed on the extracted partition.
/// Throws BudgetExceeded past max_n leaves and Stagnation if no leaf can grow.
NearBestResult hp_nearbest(double eps, ErrorFunctional& ef, const NearBestParams& params = {});

/// Greedy sequence E_{D_N}, N = 1..max_n, on a single root (index N-1).
/// `h_only` reports the pure h-greedy errors sum of e_{K,1} over leaves.
std::vector<double> greedy_sequence(const ErrorOracle& oracle, int max_n, bool h_only,
                                    ModifiedErrorRule rule = ModifiedErrorRule::ParentModified,
                                    ElementId root = {});

/// min E_D over hp-partitions below `root` with #D <= n and level <= depth_cap,
/// by explicit enumeration. `h_only` restricts to d = 1.
/// Throws CombinatorialBudget past `max_candidates` partitions.
double brute_force_sigma(int n, const ErrorOracle& oracle, int depth_cap, bool h_only = false,
                         ElementId root = {}, long max_candidates = 2000000);

/// All hp-partitions of the listed roots with #D <= n and relative depth
/// <= depth_cap; fn receives each element list.
void enumerate_partitions(const std::vector<ElementId>& roots, int n, int depth_cap, bool h_only,
                          const std::function<void(const std::vector<HpElement>&)>& fn,
                          long max_candidates = 2000000);

}  // namespace hpafem
