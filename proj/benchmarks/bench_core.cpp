#include <benchmark/benchmark.h>

#include <array>
#include <cmath>

#include "fracsob/constants.hpp"
#include "fracsob/norms.hpp"
#include "fracsob/numerics.hpp"
#include "fracsob/verify.hpp"

using namespace fracsob;

static void BM_Gamma(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fracsob::gamma(x));
    x = x < 150.0 ? x + 0.37 : 0.5;
  }
}
BENCHMARK(BM_Gamma);

static void BM_SharpConstant(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sharp_constant_K(3, 1.3));
}
BENCHMARK(BM_SharpConstant);

static void BM_Integrate1dSingular(benchmark::State& state) {
  const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    QuadResult r = integrate_1d([](double x) { return std::log(x) / std::sqrt(x); }, 0.0, 1.0, tol);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Integrate1dSingular)->DenseRange(6, 12, 3);

static void BM_Qmc(benchmark::State& state) {
  const std::array<Interval, 3> box{{{-1, 1}, {-1, 1}, {-1, 1}}};
  QmcOptions opts;
  opts.log2_points = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    QuadResult r = integrate_qmc(
        [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); }, box, opts);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * (int64_t{1} << state.range(0)) * opts.shifts);
}
BENCHMARK(BM_Qmc)->DenseRange(10, 16, 3)->Unit(benchmark::kMillisecond);

static void BM_LAlpha(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(L_alpha(1.5, 3.0));
}
BENCHMARK(BM_LAlpha)->Unit(benchmark::kMicrosecond);

static void BM_LpNorm(benchmark::State& state) {
  const TestFunction u = TestFunction::bump(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lp_norm(u, 2.7));
}
BENCHMARK(BM_LpNorm)->Arg(1)->Arg(3)->Unit(benchmark::kMicrosecond);

static void BM_FracSobolevGaussian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TestFunction u = TestFunction::gaussian(n);
  const double s = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(frac_sobolev_norm(u, s, conformal_p(n, s)));
}
BENCHMARK(BM_FracSobolevGaussian)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_FracSobolevBump(benchmark::State& state) {
  const TestFunction u = TestFunction::bump(1);
  for (auto _ : state) benchmark::DoNotOptimize(frac_sobolev_norm(u, 0.5, 1.5));
}
BENCHMARK(BM_FracSobolevBump)->Unit(benchmark::kMillisecond);

static void BM_CheckSobolevCold(benchmark::State& state) {
  const TestFunction u = TestFunction::gaussian(3);
  for (auto _ : state) {
    NormCache::global().clear();
    benchmark::DoNotOptimize(check_sobolev(u, 1.0, conformal_p(3, 1.0)));
  }
}
BENCHMARK(BM_CheckSobolevCold)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
