#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "cuelex/kernels.hpp"

using namespace cuelex::kernels;

namespace {

struct ScanFixture {
  std::vector<float> data;
  std::vector<double> inv_norm;
  std::vector<std::uint8_t> usable;
  std::vector<double> query;
  std::size_t dim;

  ScanFixture(std::size_t rows, std::size_t d) : dim(d) {
    std::mt19937_64 rng(1);
    std::normal_distribution<float> g;
    data.resize(rows * dim);
    for (auto& x : data) x = g(rng);
    inv_norm.resize(rows);
    usable.assign(rows, 1);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) s += static_cast<double>(data[r * dim + i]) * data[r * dim + i];
      inv_norm[r] = 1.0 / std::sqrt(s);
    }
    query.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(dim));
    for (auto& q : query) q *= inv_norm[0];
  }

  VectorTable table() const { return {data, dim, inv_norm, usable}; }
};

template <auto Kernel>
void BM_cosine_scan(benchmark::State& state) {
  const ScanFixture f(static_cast<std::size_t>(state.range(0)), 200);
  std::vector<double> scores(f.inv_norm.size());
  for (auto _ : state) {
    Kernel(f.table(), f.query, scores);
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct PullFixture {
  std::vector<std::size_t> offsets, targets;
  std::vector<double> coef, current, next, diff;

  explicit PullFixture(std::size_t n) {
    std::mt19937_64 rng(2);
    offsets.push_back(0);
    for (std::size_t v = 0; v < n; ++v) {
      for (int e = 0; e < 30; ++e) {
        targets.push_back(rng() % n);
        coef.push_back(1.0 / 30.0);
      }
      offsets.push_back(targets.size());
    }
    current.assign(n, 1.0 / static_cast<double>(n));
    next.resize(n);
    diff.resize(n);
  }

  PullGraph graph() const { return {offsets, targets, coef}; }
};

template <auto Kernel>
void BM_pagerank_pull(benchmark::State& state) {
  PullFixture f(static_cast<std::size_t>(state.range(0)));
  const double base = 0.15 / static_cast<double>(f.current.size());
  for (auto _ : state) {
    Kernel(f.graph(), f.current, base, 0.85, f.next, f.diff);
    benchmark::DoNotOptimize(f.next.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_cosine_scan<cosine_scan_serial>)->Name("cosine_scan/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_cosine_scan<cosine_scan_omp>)->Name("cosine_scan/omp")->Arg(10000)->Arg(100000);
BENCHMARK(BM_pagerank_pull<pagerank_pull_serial>)->Name("pagerank_pull/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_pagerank_pull<pagerank_pull_omp>)->Name("pagerank_pull/omp")->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
