// Serial reference loops against the OpenMP kernels on the same field.
// Run with OMP_NUM_THREADS or SPECDECAY_THREADS unset to use every core.

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "specdecay/kernels.hpp"

namespace {

using specdecay::cplx;
using specdecay::Grid;
namespace k = specdecay::kernels;

struct Data {
  Grid grid;
  std::vector<cplx> coeffs;
};

const Data& data(int dim, int n) {
  static std::map<std::pair<int, int>, Data> cache;
  auto it = cache.find({dim, n});
  if (it != cache.end()) return it->second;
  Grid g(dim, 2 * std::numbers::pi, n);
  std::vector<cplx> c(g.points() * dim);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  for (auto& x : c) x = {z(rng), z(rng)};
  return cache.emplace(std::pair{dim, n}, Data{g, std::move(c)}).first->second;
}

template <bool Parallel>
void weighted_energy(benchmark::State& st) {
  const auto& d = data(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const k::SpectralWeight w{1, 0.01, 0.0, 1e300};
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? k::omp::weighted_energy(d.grid, d.coeffs, w)
                                      : k::serial::weighted_energy(d.grid, d.coeffs, w));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(d.grid.points()));
}

template <bool Parallel>
void shell_energies(benchmark::State& st) {
  const auto& d = data(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? k::omp::shell_energies(d.grid, d.coeffs, 0, 6)
                                      : k::serial::shell_energies(d.grid, d.coeffs, 0, 6));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(d.grid.points()));
}

template <bool Parallel>
void leray(benchmark::State& st) {
  const auto& d = data(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? k::omp::leray_project(d.grid, d.coeffs)
                                      : k::serial::leray_project(d.grid, d.coeffs));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(d.grid.points()));
}

template <bool Parallel>
void heat(benchmark::State& st) {
  const auto& d = data(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st)
    benchmark::DoNotOptimize(Parallel ? k::omp::heat_multiply(d.grid, d.coeffs, 0.1)
                                      : k::serial::heat_multiply(d.grid, d.coeffs, 0.1));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(d.grid.points()));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({2, 256})->Args({2, 1024})->Args({3, 64})->Args({3, 128})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(weighted_energy<false>)->Name("weighted_energy/serial")->Apply(sizes);
BENCHMARK(weighted_energy<true>)->Name("weighted_energy/omp")->Apply(sizes);
BENCHMARK(shell_energies<false>)->Name("shell_energies/serial")->Apply(sizes);
BENCHMARK(shell_energies<true>)->Name("shell_energies/omp")->Apply(sizes);
BENCHMARK(leray<false>)->Name("leray_project/serial")->Apply(sizes);
BENCHMARK(leray<true>)->Name("leray_project/omp")->Apply(sizes);
BENCHMARK(heat<false>)->Name("heat_multiply/serial")->Apply(sizes);
BENCHMARK(heat<true>)->Name("heat_multiply/omp")->Apply(sizes);

BENCHMARK_MAIN();
