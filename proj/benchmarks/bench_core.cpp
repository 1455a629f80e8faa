#include <benchmark/benchmark.h>

#include "detour/fixtures.hpp"
#include "detour/spin.hpp"
#include "detour/symbol.hpp"
#include "detour/tractor.hpp"
#include "detour/yangmills.hpp"

namespace {

using namespace detour;

MetricSpec perturbed(int n) { return metric_fixture("perturbed-flat", {{"n", n}, {"seed", 3}}).spec; }

Point point(int n) {
  Point x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = 0.1 * (i + 1) - 0.25;
  return x;
}

void BM_JetProduct(benchmark::State& state) {
  const int n = 4, order = static_cast<int>(state.range(0));
  const Point x = point(n);
  const Jet a = jet_eval(parse("sin(x0)*exp(x1) + x2*x3", n), x, order);
  const Jet b = jet_eval(parse("1/(2 + x0^2 + x3)", n), x, order);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
  state.SetLabel("terms " + std::to_string(a.size()));
}
BENCHMARK(BM_JetProduct)->DenseRange(2, 6, 2);

void BM_CurvatureZoo(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MetricSpec g = perturbed(n);
  const Point x = point(n);
  for (auto _ : state) benchmark::DoNotOptimize(curvature_zoo(g, x, 4));
}
BENCHMARK(BM_CurvatureZoo)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_TwistedM(benchmark::State& state) {
  const int n = 4, k = static_cast<int>(state.range(0));
  const Point x = point(n);
  const MetricSpec g = perturbed(n);
  const ConnectionSpec c = connection_fixture("random-gl", {{"n", n}, {"rank", k}, {"degree", 3}}).spec;
  const MetricAtPoint m = MetricAtPoint::from_components(n, g.jets(x, 4));
  const Twisted tw(m, christoffel(m), c.jets(x, 4));
  Rng rng(1);
  const CTensor psi = random_field(rng, n, {Variance::Co}, k, 3, 1.0, true).jets(x, 4);
  for (auto _ : state) benchmark::DoNotOptimize(tw.M(psi));
}
BENCHMARK(BM_TwistedM)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_TractorGeometry(benchmark::State& state) {
  const MetricSpec g = perturbed(4);
  const Point x = point(4);
  for (auto _ : state) benchmark::DoNotOptimize(tractor_geometry(g, x, 5));
}
BENCHMARK(BM_TractorGeometry)->Unit(benchmark::kMillisecond);

void BM_SpinGeometry(benchmark::State& state) {
  const MetricSpec g = perturbed(4);
  const Point x = point(4);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spin_geometry(g, x, order));
}
BENCHMARK(BM_SpinGeometry)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SymbolExactness(benchmark::State& state) {
  const char* seqs[] = {"maxwell", "einstein", "twistor"};
  const std::string seq = seqs[state.range(0)];
  const SymbolPoint sp = symbol_point(perturbed(4), point(4));
  const std::vector<double> xi{0.3, -0.5, 0.7, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(exactness_check(seq, sp, xi));
  state.SetLabel(seq);
}
BENCHMARK(BM_SymbolExactness)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
