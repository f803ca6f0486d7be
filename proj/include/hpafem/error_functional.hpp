#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "hpafem/execution.hpp"
#include "hpafem/function.hpp"
#include "hpafem/mesh1d.hpp"
#include "hpafem/polyspace.hpp"

namespace hpafem {

/// Data of -(nu u')' + sigma u = f1 + f2' with 0 < nu_star <= nu <= nu_sup
/// and 0 <= sigma <= sigma_sup.
struct ProblemData {
  Function f1;
  Function f2;
  Function nu = Function::constant(1.0);
  Function sigma = Function::constant(0.0);
  double nu_star = 1.0;
  double nu_sup = 1.0;
  double sigma_sup = 0.0;

  double alpha_lower() const { return nu_star / 4.0; }
  double alpha_upper() const { return nu_sup + sigma_sup / 2.0 + 0.75 * nu_star; }

  /// Samples the bounds on a uniform grid of `samples` points with 1e-9
  /// slack. Throws Parameter on violation.
  void validate(int samples = 2001) const;
};

struct LocalErrorBreakdown {
  double e_v = 0.0;
  double osc2 = 0.0;
  double delta = 1.0;
  double total = 0.0;
};

/// Elementwise data projections: f1 in P_{p-1}, f2 in P_p, nu and sigma in
/// P_{p+1}. `data_degree[i]` is the p used on element i.
struct DataProjection {
  PiecewisePoly f1;
  PiecewisePoly f2;
  PiecewisePoly nu;
  PiecewisePoly sigma;
  std::vector<int> data_degree;
};

DataProjection project_data(const HpPartition& d, const ProblemData& data, Exec exec = default_exec());

/// The data as a ProblemData again; bounds are copied from `data`.
ProblemData as_problem(const DataProjection& proj, const ProblemData& data);

/// |(I - Pi1_{K,1}) g|_{H1(K)} <= nu_star/2 on every root, for g = nu and sigma.
bool validate_root_fineness(const HPartition& roots, const ProblemData& data);

/// e_{K,p}(v,f,lambda) = |(I - Pi1_{K,p})v|^2_{H1(K)} + osc^2_{K,p}(f,lambda) / delta,
/// memoized per element and degree. Data moments persist; v moments are
/// dropped whenever v is replaced. Safe for concurrent queries.
class ErrorFunctional {
 public:
  ErrorFunctional(std::shared_ptr<const ProblemData> data, RootsPtr roots, double delta);

  void set_v(Function v);
  std::uint64_t generation() const { return generation_; }

  const ProblemData& data() const { return *data_; }
  const RootsPtr& roots() const { return roots_; }
  double delta() const { return delta_; }

  /// Degrees above this are evaluated at the cap.
  int max_degree() const { return max_degree_; }
  void set_max_degree(int cap) { max_degree_ = cap; }

  double v_error(const ElementId& k, int p);
  double oscillation_sq(const ElementId& k, int p);
  LocalErrorBreakdown local(const ElementId& k, int p);

  /// e_{K,d} for d >= 1; d = 0 is the zero-approximation error
  /// |v|^2_{H1(K)} + (||h f1||^2 + ||f2||^2 + |nu|^2_{H1} + |sigma|^2_{H1}) / delta.
  double e(const ElementId& k, int d);

  double global_error(const HpPartition& d, Exec exec = default_exec());

  /// Number of distinct (element, degree) totals computed so far.
  std::size_t evaluations() const;

 private:
  enum Component { kVPrime = 0, kF1, kF2, kNuPrime, kSigmaPrime, kComponents };

  struct MomentKey {
    ElementId id;
    int component;
    int bucket;
    bool operator==(const MomentKey&) const = default;
  };
  struct MomentKeyHash {
    std::size_t operator()(const MomentKey& k) const noexcept;
  };
  struct TotalKey {
    ElementId id;
    int degree;
    bool operator==(const TotalKey&) const = default;
  };
  struct TotalKeyHash {
    std::size_t operator()(const TotalKey& k) const noexcept;
  };

  const Function& component(int c) const;
  double error_sq(int component, const ElementId& k, int p);
  double norm_sq(int component, const ElementId& k);
  Moments moments(int component, const ElementId& k, int bucket);

  std::shared_ptr<const ProblemData> data_;
  RootsPtr roots_;
  double delta_;
  int max_degree_ = 256;
  std::array<Function, kComponents> funcs_;
  std::uint64_t generation_ = 0;

  mutable std::shared_mutex mutex_;
  std::unordered_map<MomentKey, Moments, MomentKeyHash> moments_;
  std::unordered_map<TotalKey, double, TotalKeyHash> totals_;
};

}  // namespace hpafem
