#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hpafem/error.hpp"
#include "hpafem/error_functional.hpp"
#include "hpafem/estimator_reduce.hpp"
#include "hpafem/mesh1d.hpp"
#include "hpafem/tree_approx.hpp"

namespace hpafem {

struct AfemParams {
  double delta = 0.0;
  double big_b = 2.0;
  double b = 0.5;
  double c1 = 0.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double mu = 0.5;
  double omega = 0.0;
  double eps0 = 0.0;
  double c_f = 0.0;
  double c_bar = 0.0;
  double c_hat = 1.0;
  double safety = 0.25;

  /// eps_i / eps_{i-1}.
  double schedule_ratio() const { return mu + c1 * omega; }
  /// Reduction factor handed to REDUCE.
  double reduce_rho() const { return mu / (1.0 + (c1 + c3) * omega); }

  /// Throws Parameter unless C1 C2 < b (1 - mu), omega lies strictly inside
  /// (C2/b, (1-mu)/C1), mu + C1 omega < 1 and b omega > C2.
  void check() const;
};

struct DeriveOptions {
  double big_b = 2.0;
  double mu = 0.5;
  double safety = 0.25;
  double c_hat = 1.0;
  std::optional<double> delta;
};

/// ||f1||, ||f2|| on (0,1) by quadrature.
double l2_norm(const Function& f);

/// C(f) = (2^{-1/2} ||f1|| + ||f2||) / alpha_lower, Cbar = (1.5 C(f) + Chat + 1) / alpha_lower,
/// delta = safety (b (1 - mu) / Cbar)^2, C1 = Cbar sqrt(delta), omega the
/// geometric mean of (C2/b, (1-mu)/C1), eps0 = C(f).
AfemParams derive_params(const ProblemData& data, const DeriveOptions& opts = {});

struct IterationRecord {
  int i = 0;
  double eps = 0.0;
  long dofs_nearbest = 0;
  long dofs_reduce = 0;
  double e_sqrt = 0.0;
  double osc = 0.0;
  double est = 0.0;
  std::optional<double> true_error;
  int reduce_iters = 0;
};

struct AfemOptions {
  int max_iters = 30;
  double theta = 0.5;
  bool early_exit = true;
  long max_n = 20000;
  int max_degree = 256;
  std::optional<double> target_eps;
  ModifiedErrorRule rule = ModifiedErrorRule::ParentModified;
  /// Called after each iteration with the nearbest and reduce outputs.
  std::function<void(const IterationRecord&, const NearBestResult&, const ReduceResult&)> on_iteration;
};

struct AfemResult {
  std::vector<IterationRecord> records;
  std::optional<HpPartition> final_partition;
  std::optional<PiecewisePoly> final_solution;
  /// Set when a subroutine aborted the run; records stay valid.
  std::optional<ErrorKind> failure;
  std::string failure_message;
  bool exact = false;
};

/// Outer loop: D_i = NEARBEST(omega eps_{i-1}, u_{i-1}), then
/// REDUCE(mu / (1 + (C1 + C3) omega), D_i), eps_i = (mu + C1 omega) eps_{i-1},
/// starting from u_0 = 0.
AfemResult hp_afem(const ProblemData& data, const RootsPtr& roots, const AfemParams& params,
                   const Function* u_exact = nullptr, const AfemOptions& opts = {});

struct DecayFit {
  bool ok = false;
  double eta = 0.0;
  double tau = 0.0;
  double log_c = 0.0;
  double r2 = 0.0;
};

/// Least squares fit of log(err) = log C - eta N^tau for tau in {1/3, 1/2, 1};
/// the best r^2 wins. Needs at least 4 points with positive errors.
DecayFit decay_fit(const std::vector<std::pair<double, double>>& dofs_and_errors);

}  // namespace hpafem
