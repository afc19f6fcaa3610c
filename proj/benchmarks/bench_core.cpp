// Microbenchmarks for the inner loops that dominate experiment wall time:
// the Gillespie event step, the Euler-Maruyama sweep, canonical MCMC
// sampling, equilibrium site draws, the transport distance, and one PDE
// step.  Run with --benchmark_filter=... to narrow down.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "hydrolim/catalog.hpp"
#include "hydrolim/equilibrium.hpp"
#include "hydrolim/glk.hpp"
#include "hydrolim/metrics.hpp"
#include "hydrolim/pde.hpp"
#include "hydrolim/profile.hpp"
#include "hydrolim/rng.hpp"
#include "hydrolim/zrp.hpp"

using namespace hydrolim;

namespace {

const ModelCatalog& catalog() {
  static const ModelCatalog cat = ModelCatalog::builtin();
  return cat;
}

void bench_zrp_gillespie_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<std::int64_t> occ(static_cast<std::size_t>(n), 1);
  ZrpSimulator sim(ZrpConfiguration(occ), TransitionKernel::nearest_neighbour_symmetric(),
                   catalog().zrp("zrp-linear").rate);
  Rng rng(1);
  for (auto _ : state) {
    auto dt = sim.step(rng);
    benchmark::DoNotOptimize(dt);
  }
  state.SetItemsProcessed(state.iterations());
}

void bench_glk_em_sweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> spins(static_cast<std::size_t>(n), 0.0);
  Rng init(2);
  for (auto& s : spins) s = init.normal();
  GlkSimulator sim(GlkConfiguration(spins), catalog().glk("glk-gaussian").potential);
  Rng rng(3);
  for (auto _ : state) sim.em_step(rng);
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_sample_site_zrp_constant(benchmark::State& state) {
  const auto eq = EquilibriumStructure::for_zrp(catalog().zrp("zrp-constant").rate);
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(eq.sample_site(0.5, rng));
  state.SetItemsProcessed(state.iterations());
}

void bench_canonical_metropolis(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  const auto eq = EquilibriumStructure::for_zrp(catalog().zrp("zrp-constant").rate);
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(sample_canonical_zrp(eq, ell, 1.0, rng));
  const std::int64_t width = 2 * ell + 1;
  state.SetItemsProcessed(state.iterations() * 50 * width * width);
}

void bench_w1_circle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(6);
  std::vector<PointMass> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i)] = {rng.uniform01(), rng.uniform01()};
    b[static_cast<std::size_t>(i)] = {rng.uniform01(), rng.uniform01()};
  }
  for (auto _ : state) benchmark::DoNotOptimize(w1_circle(a, b));
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_dictionary_pairing(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ObservableDictionary dict(8);
  std::vector<std::int64_t> field(static_cast<std::size_t>(n));
  Rng rng(7);
  for (auto& v : field) v = static_cast<std::int64_t>(rng.uniform_index(5));
  const int idx = dict.index_of("cos1");
  for (auto _ : state)
    benchmark::DoNotOptimize(dict.pair_field(idx, std::span<const std::int64_t>(field)));
  state.SetItemsProcessed(state.iterations() * n);
}

void bench_pde_step(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  MacroProfile f = MacroProfile::from_function(
      m, [](double u) { return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * u); });
  const ScalarFn sigma = [](double r) { return r; };
  const double dt = 0.8 * cfl_limit(m, 1.0, 1.0);
  for (auto _ : state) pde_step(f, sigma, 1.0, 1.0, dt);
  state.SetItemsProcessed(state.iterations() * m);
}

}  // namespace

BENCHMARK(bench_zrp_gillespie_step)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bench_glk_em_sweep)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bench_sample_site_zrp_constant);
BENCHMARK(bench_canonical_metropolis)->Arg(4)->Arg(16);
BENCHMARK(bench_w1_circle)->Arg(256)->Arg(4096);
BENCHMARK(bench_dictionary_pairing)->Arg(256)->Arg(4096);
BENCHMARK(bench_pde_step)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
