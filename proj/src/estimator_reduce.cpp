#include "hpafem/estimator_reduce.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "hpafem/error.hpp"

namespace hpafem {

Coefficients coefficients_of(const DataProjection& data) {
  return Coefficients{data.nu.as_function(), data.sigma.as_function()};
}

Load load_of(const DataProjection& data) { return Load{data.f1.as_function(), data.f2.as_function()}; }

LegendreCoeffs residual_poly(const GalerkinSolution& u, const DataProjection& data, std::size_t i) {
  const LegendreCoeffs& up = u.piecewise.piece(i);
  for (const PiecewisePoly* g : {&data.f1, &data.f2, &data.nu, &data.sigma}) {
    if (g->size() != u.piecewise.size() || !(g->piece(i).iv == up.iv)) {
      throw Error(ErrorKind::PartitionMismatch,
                  fmt::format("data piece {} does not match element [{}, {}]", i, up.iv.a, up.iv.b));
    }
  }
  LegendreCoeffs r = add(data.f1.piece(i), derivative(data.f2.piece(i)));
  r = add(r, derivative(multiply(data.nu.piece(i), derivative(up))));
  r = add(r, multiply(data.sigma.piece(i), up), -1.0);
  return r;
}

double local_indicator(const LegendreCoeffs& r) {
  // z' = mean(R) - R with R' = r, so |z|^2 is the non-constant part of R.
  const LegendreCoeffs big_r = antiderivative(r, 0.0);
  double s = 0.0;
  for (std::size_t j = 1; j < big_r.c.size(); ++j) s += big_r.c[j] * big_r.c[j] / (2.0 * j + 1.0);
  return s * big_r.iv.length();
}

IndicatorSet estimate(const GalerkinSolution& u, const DataProjection& data, Exec exec) {
  IndicatorSet out;
  const std::size_t n = u.space.element_count();
  out.eta2.assign(n, 0.0);
  for_each_index(exec, n, [&](std::size_t i) { out.eta2[i] = local_indicator(residual_poly(u, data, i)); });
  double s = 0.0;
  for (double v : out.eta2) s += v;
  out.est = std::sqrt(s);
  return out;
}

std::vector<std::size_t> mark(const IndicatorSet& ind, double theta) {
  if (!(theta > 0.0)) throw Error(ErrorKind::Parameter, "marking parameter theta must lie in (0,1]");
  std::vector<std::size_t> order(ind.eta2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ind.eta2[a] > ind.eta2[b]; });
  const double total = std::accumulate(ind.eta2.begin(), ind.eta2.end(), 0.0);
  std::vector<std::size_t> marked;
  double acc = 0.0;
  for (std::size_t i : order) {
    if (ind.eta2[i] <= 0.0) break;
    if (theta < 1.0 && acc >= theta * total) break;
    marked.push_back(i);
    acc += ind.eta2[i];
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

HpPartition refine(const HpPartition& d, const std::vector<std::size_t>& marked, const std::vector<int>& data_degree) {
  std::vector<HpElement> els(d.elements().begin(), d.elements().end());
  for (std::size_t i : marked) els.at(i).d = data_degree.at(i) + els[i].d + 3;
  return HpPartition(d.roots(), std::move(els));
}

double contraction_factor(const ReduceParams& p) {
  if (!(p.theta > 0.0 && p.theta <= 1.0)) throw Error(ErrorKind::Parameter, "theta must lie in (0,1]");
  return std::sqrt(std::max(0.0, 1.0 - (p.alpha_lower / p.alpha_upper) * p.theta));
}

int iteration_count(double rho, const ReduceParams& p) {
  if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorKind::Parameter, "reduction factor rho must lie in (0,1]");
  const double target = rho * std::sqrt(p.alpha_lower / p.alpha_upper);
  if (target >= 1.0) return 0;
  const double kappa = contraction_factor(p);
  if (kappa == 0.0) return 1;
  return std::max(0, static_cast<int>(std::ceil(std::log(target) / std::log(kappa) - 1e-12)));
}

ReduceResult reduce(double rho, const HpPartition& d, const DataProjection& data, const ReduceParams& params,
                    const Function* reference, Exec exec) {
  const int m = iteration_count(rho, params);
  const Coefficients lam = coefficients_of(data);
  const Load load = load_of(data);
  const double scale = std::sqrt(l2_norm_sq(data.f1)) + std::sqrt(l2_norm_sq(data.f2));
  const double floor_est = 1e-13 * std::max(scale, 1e-300);

  HpPartition current = d;
  GalerkinSolution sol = solve(ConformingSpace(current), load, lam, exec);
  IndicatorSet ind = estimate(sol, data, exec);
  const double est0 = ind.est;
  ReduceResult out{current, sol, ind, m, 0, false, {}, {}};

  auto energy_error = [&](const GalerkinSolution& s) -> std::optional<double> {
    if (!reference) return std::nullopt;
    return energy_norm(difference(*reference, s.piecewise.as_function()), lam);
  };

  for (int i = 1; i <= m; ++i) {
    if (ind.est <= floor_est) {
      out.early_exit = true;
      break;
    }
    if (params.early_exit && i > 1 && ind.est <= rho * (params.alpha_lower / params.alpha_upper) * est0) {
      out.early_exit = true;
      break;
    }
    const auto marked = mark(ind, params.theta);
    out.trace.push_back({i - 1, ind.est, energy_error(sol), total_dof(current), static_cast<long>(marked.size())});
    if (params.keep_history) out.history.push_back({sol, ind, marked});
    current = refine(current, marked, data.data_degree);
    sol = solve(ConformingSpace(current), load, lam, exec);
    ind = estimate(sol, data, exec);
    out.iterations = i;
  }
  out.trace.push_back({out.iterations, ind.est, energy_error(sol), total_dof(current), 0});
  if (params.keep_history) out.history.push_back({sol, ind, {}});
  out.partition = current;
  out.solution = sol;
  out.indicators = ind;
  return out;
}

}  // namespace hpafem
