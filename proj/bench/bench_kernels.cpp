#include <benchmark/benchmark.h>

#include <omp.h>

#include "afree/field.hpp"
#include "afree/kernels.hpp"
#include "afree/rng.hpp"
#include "afree/symbol.hpp"
#include "afree/transform.hpp"

// Serial-reference vs OpenMP kernel comparison. The reference DFT is the
// direct O((n^d)^2) sum, so it only runs at small sizes; the separable kernel
// additionally runs at working sizes with 1 and all threads.

using namespace afree;

namespace {

std::vector<std::complex<double>> random_complex(std::size_t n, unsigned long long seed) {
  Rng rng(seed);
  std::vector<std::complex<double>> v(n);
  for (auto& c : v) c = {rng.gaussian(), rng.gaussian()};
  return v;
}

void BM_dft_direct_ref(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int dim = 2, fiber = 2;
  Grid g(dim, n);
  auto in = random_complex(static_cast<std::size_t>(g.points()) * fiber, 1);
  std::vector<std::complex<double>> out(in.size());
  for (auto _ : state) {
    ref::dft_direct(in.data(), out.data(), n, dim, fiber, -1);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_dft_separable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  const int dim = 2, fiber = 2;
  Grid g(dim, n);
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
  auto in = random_complex(static_cast<std::size_t>(g.points()) * fiber, 1);
  const auto tw = kernels::make_twiddle(n, -1);
  for (auto _ : state) {
    auto work = in;
    for (int axis = 0; axis < dim; ++axis)
      kernels::dft_axis_pass(work.data(), tw.data(), n, axis, dim, fiber);
    benchmark::DoNotOptimize(work.data());
  }
}

void BM_reduce_ref(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<double> data(n);
  for (auto& v : data) v = rng.gaussian();
  for (auto _ : state) {
    const double s = ref::reduce_sum(n, [&](std::size_t i) { return data[i]; });
    benchmark::DoNotOptimize(s);
  }
}

void BM_reduce_omp(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<double> data(n);
  for (auto& v : data) v = rng.gaussian();
  for (auto _ : state) {
    const double s = kernels::reduce_sum(n, [&](std::size_t i) { return data[i]; });
    benchmark::DoNotOptimize(s);
  }
}

void BM_rank_sweep(benchmark::State& state) {
  const int n_samples = static_cast<int>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
  const DiffOp op = make_operator("curl", {{"m", 2}, {"d", 2}});
  for (auto _ : state) {
    const RankReport r = constant_rank_check(op, n_samples);
    benchmark::DoNotOptimize(r.min_rank);
  }
}

} // namespace

BENCHMARK(BM_dft_direct_ref)->Arg(9)->Arg(17)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dft_separable)
    ->Args({9, 1})
    ->Args({17, 1})
    ->Args({33, 1})
    ->Args({65, 1})
    ->Args({65, 0})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_reduce_ref)->Arg(1 << 16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_reduce_omp)->Arg(1 << 16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_rank_sweep)->Args({1000, 1})->Args({1000, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
