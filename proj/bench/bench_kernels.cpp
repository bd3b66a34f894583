#include <benchmark/benchmark.h>

#include <map>

#include "ldg/kernels.hpp"
#include "ldg/seeds.hpp"

using namespace ldg;

namespace {

constexpr double kXi = 1.0 / 70;

const FieldArray& field_of_size(int n) {
  static std::map<int, FieldArray> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    GridSpec s;
    s.n_rho = n;
    s.n_z = n;
    it = cache.emplace(n, comparison_seed(build_grid(s), 1e-3)).first;
  }
  return it->second;
}

void BM_EnergySerial(benchmark::State& st) {
  const FieldArray& f = field_of_size(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::energy_serial(f, kXi));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(f.size()));
}

void BM_EnergyParallel(benchmark::State& st) {
  const FieldArray& f = field_of_size(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::energy(f, kXi));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(f.size()));
}

void BM_DerivativeSerial(benchmark::State& st) {
  const FieldArray& f = field_of_size(static_cast<int>(st.range(0)));
  std::vector<QComponents> out;
  for (auto _ : st) {
    kernels::energy_derivative_serial(f, kXi, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(f.size()));
}

void BM_DerivativeParallel(benchmark::State& st) {
  const FieldArray& f = field_of_size(static_cast<int>(st.range(0)));
  std::vector<QComponents> out;
  for (auto _ : st) {
    kernels::energy_derivative(f, kXi, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(f.size()));
}

}  // namespace

BENCHMARK(BM_EnergySerial)->Arg(129)->Arg(513);
BENCHMARK(BM_EnergyParallel)->Arg(129)->Arg(513);
BENCHMARK(BM_DerivativeSerial)->Arg(129)->Arg(513);
BENCHMARK(BM_DerivativeParallel)->Arg(129)->Arg(513);

BENCHMARK_MAIN();
