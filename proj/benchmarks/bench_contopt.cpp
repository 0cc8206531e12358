#include <benchmark/benchmark.h>

#include "greybox/contopt/bench.hpp"
#include "greybox/contopt/nelder_mead.hpp"
#include "greybox/contopt/simplex.hpp"
#include "greybox/contopt/test_functions.hpp"

namespace {

using namespace greybox::contopt;

void BM_BuildSimplex(benchmark::State& state) {
  const Vector x(static_cast<std::size_t>(state.range(0)), 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(build_simplex(InitRule::pfeffer(), x));
}
BENCHMARK(BM_BuildSimplex)->Arg(2)->Arg(10)->Arg(100);

void BM_SimplexQuality(benchmark::State& state) {
  const auto s = build_simplex(InitRule::nash(), Vector(static_cast<std::size_t>(state.range(0)), 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(simplex_quality(s));
}
BENCHMARK(BM_SimplexQuality)->Arg(2)->Arg(10)->Arg(50);

void BM_NelderMeadSphere(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto fn = shifted_sphere(Vector(n, 2.0));
  const auto s = build_simplex(InitRule::region_of_interest(0.5), Vector(n, 0.0));
  NMConfig cfg;
  cfg.max_evals = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(nelder_mead(fn.objective(), s, cfg));
}
BENCHMARK(BM_NelderMeadSphere)->Arg(2)->Arg(5)->Arg(10);

void BM_NelderMeadRosenbrock(benchmark::State& state) {
  const auto fn = rosenbrock(2);
  const auto s = build_simplex(InitRule::region_of_interest(0.1), {-1.2, 1.0});
  NMConfig cfg;
  cfg.max_evals = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(nelder_mead(fn.objective(), s, cfg));
}
BENCHMARK(BM_NelderMeadRosenbrock);

void BM_WrappedObjective(benchmark::State& state) {
  const auto fn = sphere(10);
  const auto g = wrap_objective(fn.objective(), normalization_map(BoxDomain::cube(10, -1e4, 1e4)));
  const Vector u(10, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(g(u));
}
BENCHMARK(BM_WrappedObjective);

void BM_BenchTable(benchmark::State& state) {
  BenchConfig cfg;
  cfg.functions = {shifted_sphere({2, 2}), rosenbrock(2)};
  cfg.starts = {{0, 0}, {-1.2, 1}};
  cfg.rules = {InitRule::pfeffer(), InitRule::nash(), InitRule::region_of_interest(0.5)};
  cfg.replicates = 4;
  cfg.nm.max_evals = 500;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(benchmark_init_rules(cfg));
}
BENCHMARK(BM_BenchTable)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace
