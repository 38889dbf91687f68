#include <benchmark/benchmark.h>

#include "pxharm/barriers.hpp"
#include "pxharm/geometry.hpp"
#include "pxharm/grid.hpp"
#include "pxharm/measure.hpp"
#include "pxharm/solver.hpp"

using namespace pxharm;

static void BM_BuildGrid(benchmark::State& state) {
  const auto d = Domain::disk(1.0);
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_grid(d, h));
}
BENCHMARK(BM_BuildGrid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SolveConstantP(benchmark::State& state) {
  const auto g = build_grid(Domain::annulus(0.25, 1.0), 1.0 / static_cast<double>(state.range(0)));
  const auto p = ExponentField::constant(4.0);
  const BoundaryData f = [](const Vec2& x) { return std::pow(x.norm(), 2.0 / 3.0); };
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(g, p, f));
  state.counters["nodes"] = static_cast<double>(g->size());
}
BENCHMARK(BM_SolveConstantP)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_SolveVariableP(benchmark::State& state) {
  const auto g = build_grid(Domain::disk(1.0), 1.0 / static_cast<double>(state.range(0)));
  const auto p = ExponentField::affine(2.0, Vec2(0.3, 0.0));
  const BoundaryData f = [](const Vec2& x) { return std::max(0.0, x.y() + 0.5); };
  SolveOptions o;
  o.method = state.range(1) ? SolveMethod::DampedNewton : SolveMethod::Picard;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(g, p, f, o));
}
BENCHMARK(BM_SolveVariableP)->Args({32, 1})->Args({32, 0})->Args({64, 1})->Unit(benchmark::kMillisecond);

static void BM_Quasihyperbolic(benchmark::State& state) {
  const auto slab = Domain::slab(2.0);
  const double step = 0.01 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(quasihyperbolic_distance(slab, Vec2(0, 0.1), Vec2(0.3, 0.6), step));
}
BENCHMARK(BM_Quasihyperbolic)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_HarnackChain(benchmark::State& state) {
  const auto d = Domain::disk(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(harnack_chain(d, Vec2(0, -1), 0.8, Vec2(0.1, -0.95), Vec2(-0.1, -0.75)));
}
BENCHMARK(BM_HarnackChain)->Unit(benchmark::kMillisecond);

static void BM_Certify(benchmark::State& state) {
  const auto p = ExponentField::affine(2.0, Vec2(0.5, 0.0), Box{Vec2(-1, -1), Vec2(1, 1)});
  BarrierSpec s;
  s.family = BarrierFamily::WolanskiSuper;
  s.radius = 0.1;
  s.mu = wolanski_mu_star(p, 1.0, 0.1);
  CertifyOptions o;
  o.samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(certify(s, p, 2, o));
}
BENCHMARK(BM_Certify)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_RieszMeasure(benchmark::State& state) {
  const auto g = build_covering_grid(Domain::slab(2.0), Box{Vec2(-0.5, -0.5), Vec2(0.5, 0.5)}, 0.005);
  const auto u = ScalarField::sample(g, [](const Vec2& x) { return std::max(0.0, x.y()); });
  const auto p = ExponentField::constant(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(riesz_measure(u, p, Vec2::Zero(), 0.25));
}
BENCHMARK(BM_RieszMeasure)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
