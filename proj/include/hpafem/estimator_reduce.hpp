#pragma once

#include <optional>
#include <vector>

#include "hpafem/error_functional.hpp"
#include "hpafem/execution.hpp"
#include "hpafem/fem1d.hpp"
#include "hpafem/mesh1d.hpp"
#include "hpafem/polyspace.hpp"

namespace hpafem {

Coefficients coefficients_of(const DataProjection& data);
Load load_of(const DataProjection& data);

/// r = f1 + f2' + (nu u')' - sigma u on element i, in exact polynomial
/// arithmetic. Throws PartitionMismatch if the data pieces do not match
/// the element.
LegendreCoeffs residual_poly(const GalerkinSolution& u, const DataProjection& data, std::size_t i);

/// |z|^2_{H1(K)} for -z'' = r on K with z = 0 at both endpoints.
double local_indicator(const LegendreCoeffs& r);

struct IndicatorSet {
  std::vector<double> eta2;
  double est = 0.0;
};

IndicatorSet estimate(const GalerkinSolution& u, const DataProjection& data, Exec exec = default_exec());

/// Minimal Doerfler set: largest eta^2 first (ties by element order) until
/// theta * est^2 is reached. theta >= 1 marks every element with eta > 0.
std::vector<std::size_t> mark(const IndicatorSet& ind, double theta);

/// Raises each marked degree p to data_degree + p + 3.
HpPartition refine(const HpPartition& d, const std::vector<std::size_t>& marked, const std::vector<int>& data_degree);

struct ReduceParams {
  double theta = 0.5;
  double alpha_lower = 0.25;
  double alpha_upper = 1.75;
  /// Stop once est_i <= rho (alpha_lower/alpha_upper) est_0.
  bool early_exit = true;
  bool keep_history = false;
};

/// kappa = sqrt(1 - (alpha_lower/alpha_upper) theta).
double contraction_factor(const ReduceParams& p);
/// Smallest M with sqrt(alpha_upper/alpha_lower) kappa^M <= rho.
int iteration_count(double rho, const ReduceParams& p);

struct ReduceTraceRow {
  int i = 0;
  double est = 0.0;
  std::optional<double> energy_error;
  long dofs = 0;
  long num_marked = 0;
};

struct ReduceStep {
  GalerkinSolution solution;
  IndicatorSet indicators;
  std::vector<std::size_t> marked;
};

struct ReduceResult {
  HpPartition partition;
  GalerkinSolution solution;
  IndicatorSet indicators;
  int planned_iterations = 0;
  int iterations = 0;
  bool early_exit = false;
  std::vector<ReduceTraceRow> trace;
  std::vector<ReduceStep> history;
};

/// SOLVE, then up to M(rho) rounds of ESTIMATE / MARK / REFINE / SOLVE with
/// fixed data. `reference`, if given, is u(f_D, lambda_D) for the trace.
ReduceResult reduce(double rho, const HpPartition& d, const DataProjection& data, const ReduceParams& params,
                    const Function* reference = nullptr, Exec exec = default_exec());

}  // namespace hpafem
