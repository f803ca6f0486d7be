#include <benchmark/benchmark.h>
#include <memory>

#include "hpafem/error_functional.hpp"
#include "hpafem/estimator_reduce.hpp"
#include "hpafem/fem1d.hpp"
#include "hpafem/problems.hpp"

using namespace hpafem;

namespace {

RootsPtr unit() { return std::make_shared<const RootPartition>(RootPartition::uniform(1)); }

// Geometric mesh towards 0 with degrees growing away from it.
HpPartition graded(int levels) {
  HpPartition d = HpPartition::from_roots(unit(), 1);
  for (int i = 0; i < levels; ++i) d = bisect(d, 0);
  std::vector<HpElement> els(d.elements().begin(), d.elements().end());
  for (std::size_t i = 0; i < els.size(); ++i) els[i].d = 2 + static_cast<int>(i) / 2;
  return HpPartition(unit(), els);
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_Assemble(benchmark::State& state) {
  const Problem p = sine_var_problem();
  const ConformingSpace space(graded(static_cast<int>(state.range(0))));
  const Coefficients lam{p.data.nu, p.data.sigma};
  const Load f{p.data.f1, p.data.f2};
  for (auto _ : state) benchmark::DoNotOptimize(assemble(space, lam, f, exec_of(state)));
}

void BM_Estimate(benchmark::State& state) {
  const Problem p = sine_var_problem();
  const HpPartition d = graded(static_cast<int>(state.range(0)));
  const DataProjection data = project_data(d, p.data);
  const GalerkinSolution u = solve(ConformingSpace(d), load_of(data), coefficients_of(data));
  for (auto _ : state) benchmark::DoNotOptimize(estimate(u, data, exec_of(state)));
}

void BM_GlobalError(benchmark::State& state) {
  const Problem p = xalpha_problem(0.7);
  const auto data = std::make_shared<const ProblemData>(p.data);
  const HpPartition d = graded(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    ErrorFunctional ef(data, unit(), 1e-3);
    ef.set_v(*p.u_exact);
    benchmark::DoNotOptimize(ef.global_error(d, exec_of(state)));
  }
}

void BM_ProjectData(benchmark::State& state) {
  const Problem p = sine_var_problem();
  const HpPartition d = graded(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(project_data(d, p.data, exec_of(state)));
}

void args(benchmark::internal::Benchmark* b) {
  for (int levels : {8, 32}) {
    for (int par : {0, 1}) b->Args({levels, par});
  }
  b->ArgNames({"levels", "parallel"});
}

}  // namespace

BENCHMARK(BM_Assemble)->Apply(args);
BENCHMARK(BM_Estimate)->Apply(args);
BENCHMARK(BM_GlobalError)->Apply(args);
BENCHMARK(BM_ProjectData)->Apply(args);

BENCHMARK_MAIN();
