#include <benchmark/benchmark.h>

#include "taylor/analytic.hpp"
#include "taylor/geometry.hpp"
#include "taylor/montecarlo.hpp"
#include "taylor/stochastic.hpp"

namespace {

using namespace taylor;

void BM_Term(benchmark::State& state) {
  const CoefficientSequence a = CoefficientSequence::constant(1.0);
  std::size_t n = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(term(a, 2.5, n));
    n = (n + 1) % 400;
  }
}
BENCHMARK(BM_Term);

void BM_EvaluateExponential(benchmark::State& state) {
  const TaylorMeasure T(CoefficientSequence::constant(1.0), static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(T, NatSet::all(), 1e-12));
  }
}
BENCHMARK(BM_EvaluateExponential)->Arg(1)->Arg(10)->Arg(50);

void BM_JordanPoissonTaylor(benchmark::State& state) {
  const TaylorMeasure T = poisson_taylor(2.0, 1.0);
  for (auto _ : state) {
    const JordanPair J = jordan_decompose(T);
    benchmark::DoNotOptimize(J.positive(NatSet::all()));
    benchmark::DoNotOptimize(J.negative(NatSet::all()));
  }
}
BENCHMARK(BM_JordanPoissonTaylor);

void BM_InnerProduct(benchmark::State& state) {
  const TaylorMeasure A(CoefficientSequence::geometric(1.0, 0.5), 2.0);
  const TaylorMeasure B(CoefficientSequence::constant(1.0), 1.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(inner_product(A, B, NatSet::all()));
  }
}
BENCHMARK(BM_InnerProduct);

void BM_SamplePoisson(benchmark::State& state) {
  const PowerSeriesPmf p = PowerSeriesPmf::poisson(2.0);
  SampleOptions opts;
  opts.kind = state.range(1) == 0 ? SamplerKind::InverseCdf : SamplerKind::Rejection;
  const std::size_t L = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_pmf(p, {seed++, 0}, L, opts));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SamplePoisson)->Args({100'000, 0})->Args({100'000, 1});

void BM_EstimateMeasure(benchmark::State& state) {
  const CoefficientSequence one = CoefficientSequence::constant(1.0);
  McOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_measure(2.0, one, 1.0, one, NatSet::finite({0, 1, 2}),
                                              static_cast<std::size_t>(state.range(0)),
                                              static_cast<std::size_t>(state.range(0)), {seed++, 0}, opts));
  }
}
BENCHMARK(BM_EstimateMeasure)->Args({1'000'000, 1})->Args({1'000'000, 4})->Unit(benchmark::kMillisecond);

void BM_StmGaussian(benchmark::State& state) {
  const stm::GaussianIID spec{1.0, 1.0, 1.0};
  const TruncationPlan plan = stm_truncation_plan(spec);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_stm(spec, NatSet::all(), plan, {seed++, 0}));
  }
}
BENCHMARK(BM_StmGaussian);

void BM_AnalyticEval(benchmark::State& state) {
  const AnalyticRep rep = sin_rep();
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(rep, x));
    x = x > 3.0 ? -3.0 : x + 0.01;
  }
}
BENCHMARK(BM_AnalyticEval);

void BM_AnalyticProduct(benchmark::State& state) {
  for (auto _ : state) {
    const AnalyticRep p = multiply(exp_rep(), sin_rep());
    benchmark::DoNotOptimize(eval(p, 0.7));
  }
}
BENCHMARK(BM_AnalyticProduct);

void BM_Recenter(benchmark::State& state) {
  for (auto _ : state) {
    const AnalyticRep r = recenter(exp_rep(), 1.0);
    benchmark::DoNotOptimize(r.coefficients.at(static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_Recenter)->Arg(5)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
