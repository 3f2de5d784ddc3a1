// Serial reference vs OpenMP kernels, plus the LE branch engine.
// Thread count follows DRLAB_THREADS / OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "drlab/channels.hpp"
#include "drlab/entanglement.hpp"
#include "drlab/kernels.hpp"
#include "drlab/states.hpp"

using namespace drlab;

namespace {

kernels::PureEnsemble cluster_ensemble(int n_logical) {
  kernels::PureEnsemble e;
  e.n_modes = 2 * n_logical;
  e.weights = {1.0};
  e.kets = {make_ideal_cluster(n_logical, Branch::plus).ket()};
  return e;
}

template <auto Sample>
void BM_Sample(benchmark::State& st) {
  const auto ens = cluster_ensemble(static_cast<int>(st.range(0)));
  const std::vector<double> n0(static_cast<std::size_t>(ens.n_modes), 3.0);
  const std::int64_t shots = 1 << 16;
  std::vector<cplx> out(static_cast<std::size_t>(shots * ens.n_modes));
  for (auto _ : st) {
    Sample(ens, n0, shots, 7, out.data());
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * shots);
}

template <auto Sums>
void BM_Moments(benchmark::State& st) {
  const int n_modes = static_cast<int>(st.range(0));
  const std::int64_t shots = 1 << 16;
  std::vector<cplx> data(static_cast<std::size_t>(shots * n_modes));
  kernels::serial::sample_heterodyne(cluster_ensemble(n_modes / 2), std::vector<double>(n_modes, 3.0),
                                     shots, 3, data.data());
  std::vector<int> window(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k) window[static_cast<std::size_t>(k)] = k;
  for (auto _ : st) benchmark::DoNotOptimize(Sums(data.data(), shots, n_modes, window, 1, 16, nullptr));
  st.SetItemsProcessed(st.iterations() * shots);
}

void BM_LeBranches(benchmark::State& st) {
  NoiseParams p;
  p.loss_w1 = p.loss_w2 = 0.07;
  p.dephase = 0.23;
  const auto ch = noisy_emission_channel(p);
  const bool parallel = st.range(1) != 0;
  for (auto _ : st)
    benchmark::DoNotOptimize(le_from_channel(ch, LeVariant::logical, 0, static_cast<int>(st.range(0)), parallel));
}

}  // namespace

BENCHMARK(BM_Sample<kernels::serial::sample_heterodyne>)->Name("sample/serial")->Arg(2)->Arg(3);
BENCHMARK(BM_Sample<kernels::omp::sample_heterodyne>)->Name("sample/omp")->Arg(2)->Arg(3);
BENCHMARK(BM_Moments<kernels::serial::moment_block_sums>)->Name("moments/serial")->Arg(4)->Arg(6);
BENCHMARK(BM_Moments<kernels::omp::moment_block_sums>)->Name("moments/omp")->Arg(4)->Arg(6);
BENCHMARK(BM_LeBranches)->Name("le_branches")->Args({8, 0})->Args({8, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
