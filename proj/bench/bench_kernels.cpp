#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "degenlab/evolve.hpp"
#include "degenlab/grid.hpp"
#include "degenlab/kernels.hpp"
#include "degenlab/profile_io.hpp"

using namespace degenlab;

namespace {

DiscreteOperator make_operator(int dim, std::size_t n) {
  nlohmann::json doc = dim == 1
      ? nlohmann::json::parse(R"({"dimension":1,"family":{"kind":"power","delta":0.5,"centers":[0.0]},
                                  "domain":[-4.0,4.0]})")
      : nlohmann::json::parse(R"({"dimension":2,"family":{"kind":"radial","delta":0.5,"radius":1.0},
                                  "domain":[[-2.0,2.0],[-2.0,2.0]]})");
  const auto profile = profile_from_json(doc);
  const auto& d = profile.domain();
  return assemble(profile, build_mesh(dim, d, n), 0.0);
}

std::vector<double> test_vector(std::size_t N) {
  std::vector<double> x(N);
  for (std::size_t i = 0; i < N; ++i) x[i] = std::sin(0.37 * static_cast<double>(i));
  return x;
}

void BM_ApplyCsrSerial(benchmark::State& state) {
  const auto A = make_operator(static_cast<int>(state.range(0)), state.range(1));
  const auto x = test_vector(A.size());
  std::vector<double> y(A.size());
  for (auto _ : state) {
    kernels::apply_csr(A.csr(), x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(A.size()));
}

void BM_ApplyStencil(benchmark::State& state, kernels::Exec exec) {
  const auto A = make_operator(static_cast<int>(state.range(0)), state.range(1));
  const auto x = test_vector(A.size());
  std::vector<double> y(A.size());
  for (auto _ : state) {
    kernels::apply(A, x, y, exec);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(A.size()));
}

void BM_Chebyshev(benchmark::State& state, kernels::Exec exec) {
  const auto A = make_operator(static_cast<int>(state.range(0)), state.range(1));
  const auto x = test_vector(A.size());
  const ChebyshevExp E(A, 0.01);
  std::vector<double> y(A.size());
  for (auto _ : state) {
    E.apply(x, y, exec);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["degree"] = static_cast<double>(E.degree());
}

void BM_Dot(benchmark::State& state, kernels::Exec exec) {
  const auto x = test_vector(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(x, x, exec));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({1, 4096})->Args({1, 65536})->Args({2, 128})->Args({2, 512});
}

}  // namespace

BENCHMARK(BM_ApplyCsrSerial)->Apply(sizes);
BENCHMARK_CAPTURE(BM_ApplyStencil, serial, kernels::Exec::Serial)->Apply(sizes);
BENCHMARK_CAPTURE(BM_ApplyStencil, parallel, kernels::Exec::Parallel)->Apply(sizes);
BENCHMARK_CAPTURE(BM_Chebyshev, serial, kernels::Exec::Serial)->Args({1, 4096})->Args({2, 128});
BENCHMARK_CAPTURE(BM_Chebyshev, parallel, kernels::Exec::Parallel)->Args({1, 4096})->Args({2, 128});
BENCHMARK_CAPTURE(BM_Dot, serial, kernels::Exec::Serial)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_Dot, parallel, kernels::Exec::Parallel)->Arg(1 << 20);

BENCHMARK_MAIN();
