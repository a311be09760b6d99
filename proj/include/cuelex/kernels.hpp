#pragma once

// Data-parallel inner loops. Every kernel has a serial reference twin with
// identical per-element arithmetic, so results match bit for bit; the
// reference versions back the tests and the benchmark.

#include <cstddef>
#include <cstdint>
#include <span>

namespace cuelex::kernels {

/// Row-major float vectors with a precomputed inverse norm per row.
struct VectorTable {
  std::span<const float> data;
  std::size_t dim = 0;
  std::span<const double> inv_norm;
  std::span<const std::uint8_t> usable;

  std::size_t rows() const { return inv_norm.size(); }
};

/// scores[j] = sum_i query_unit[i] * (row_j[i] * inv_norm[j]), summed in
/// index order. Unusable rows score -infinity.
void cosine_scan_serial(const VectorTable& table, std::span<const double> query_unit,
                        std::span<double> scores);
void cosine_scan_omp(const VectorTable& table, std::span<const double> query_unit,
                     std::span<double> scores);

/// Adjacency in CSR form; coef[e] is the transition probability from
/// neighbor targets[e] into the row's node.
struct PullGraph {
  std::span<const std::size_t> offsets;
  std::span<const std::size_t> targets;
  std::span<const double> coef;

  std::size_t nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

/// next[v] = base + damping * sum_e coef[e] * current[targets[e]];
/// diff[v] = |next[v] - current[v]|.
void pagerank_pull_serial(const PullGraph& g, std::span<const double> current, double base,
                          double damping, std::span<double> next, std::span<double> diff);
void pagerank_pull_omp(const PullGraph& g, std::span<const double> current, double base,
                       double damping, std::span<double> next, std::span<double> diff);

/// Worker cap for the OpenMP kernels; 0 leaves the runtime default.
void set_threads(int n);

}  // namespace cuelex::kernels
