#include <vector>

#include <benchmark/benchmark.h>

#include "eikfm/analytic.hpp"
#include "eikfm/convergence.hpp"
#include "eikfm/fast_marching.hpp"
#include "eikfm/sensitivity.hpp"
#include "eikfm/tomography.hpp"

namespace {

using namespace eikfm;

// Arg: 1/h for the 2D CGSS case (40 -> 161x321).
void BM_FmSolve(benchmark::State& state, int order) {
  const AnalyticCase c = default_params(CaseKind::kCgss, 2);
  const RegularGrid g = case_grid(c, 1.0 / static_cast<double>(state.range(0)));
  const AnalyticFields f = eval_case(c, g);
  const DistanceFactor dist = build_distance_factor(g, f.source);
  FmConfig cfg;
  cfg.order = order;
  for (auto _ : state) {
    FmSolution sol = fm_solve(f.m, f.source, dist, cfg);
    benchmark::DoNotOptimize(sol.tau1.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK_CAPTURE(BM_FmSolve, first_order, 1)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FmSolve, second_order, 2)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_FmSolvePlain(benchmark::State& state) {
  const AnalyticCase c = default_params(CaseKind::kCgss, 2);
  const RegularGrid g = case_grid(c, 1.0 / static_cast<double>(state.range(0)));
  const AnalyticFields f = eval_case(c, g);
  FmConfig cfg;
  cfg.mode = FmMode::kPlain;
  for (auto _ : state) {
    FmSolution sol = fm_solve(f.m, f.source, cfg);
    benchmark::DoNotOptimize(sol.tau1.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_FmSolvePlain)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state, bool transpose) {
  const AnalyticCase c = default_params(CaseKind::kGauss, 2);
  const RegularGrid g = case_grid(c, 1.0 / static_cast<double>(state.range(0)));
  const AnalyticFields f = eval_case(c, g);
  const DistanceFactor dist = build_distance_factor(g, f.source);
  FmConfig cfg;
  cfg.order = 2;
  const auto op = SensitivityOperator::assemble(fm_solve(f.m, f.source, dist, cfg), dist);
  const ScalarField v(g, 1.0);
  for (auto _ : state) {
    ScalarField e = transpose ? op.apply_jacobian_transpose(v) : op.apply_jacobian(v);
    benchmark::DoNotOptimize(e.values().data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK_CAPTURE(BM_Jacobian, forward, false)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Jacobian, transpose, true)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_WorkUnitResidual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RegularGrid g = RegularGrid::make2d(n, 2 * n - 1, 1.0);
  const DistanceFactor dist = build_distance_factor(g, SourceSpec{{n / 2, n, 0}});
  const ScalarField m(g, 1.0);
  std::vector<double> out(static_cast<std::size_t>(g.size()));
  for (auto _ : state) {
    eikonal_residual(dist.tau0, m, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_WorkUnitResidual)->Arg(321)->Arg(1281)->Unit(benchmark::kMillisecond);

void BM_DeskGaussNewtonIteration(benchmark::State& state) {
  const DeskScenario desk = desk_scenario();
  const SyntheticSurvey syn = synthesize_survey(desk.m_true, desk.geometry, 0.01, 7);
  InversionConfig cfg;
  cfg.n_gn = 1;
  cfg.bound = desk.bound;
  cfg.m_ref = desk.m_ref;
  const ScalarField init = desk.bound.inverse(desk.m_ref);
  for (auto _ : state) {
    InversionResult r = gauss_newton(syn.survey, cfg, init);
    benchmark::DoNotOptimize(r.m_final.values().data());
  }
}
BENCHMARK(BM_DeskGaussNewtonIteration)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
