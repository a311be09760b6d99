#include "cuelex/kernels.hpp"

#include <cmath>
#include <limits>

#include <omp.h>

namespace cuelex::kernels {

namespace {

inline double row_cosine(const float* row, std::size_t dim, double inv, const double* q) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) s += q[i] * (static_cast<double>(row[i]) * inv);
  return s;
}

inline void pull_one(const PullGraph& g, std::span<const double> current, double base,
                     double damping, std::size_t v, std::span<double> next,
                     std::span<double> diff) {
  double acc = 0.0;
  for (std::size_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e)
    acc += g.coef[e] * current[g.targets[e]];
  next[v] = base + damping * acc;
  diff[v] = std::abs(next[v] - current[v]);
}

}  // namespace

void cosine_scan_serial(const VectorTable& table, std::span<const double> query_unit,
                        std::span<double> scores) {
  const std::size_t n = table.rows();
  for (std::size_t j = 0; j < n; ++j) {
    scores[j] = table.usable[j]
                    ? row_cosine(table.data.data() + j * table.dim, table.dim,
                                 table.inv_norm[j], query_unit.data())
                    : -std::numeric_limits<double>::infinity();
  }
}

void cosine_scan_omp(const VectorTable& table, std::span<const double> query_unit,
                     std::span<double> scores) {
  const auto n = static_cast<std::ptrdiff_t>(table.rows());
  const float* base = table.data.data();
  const double* q = query_unit.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    scores[u] = table.usable[u] ? row_cosine(base + u * table.dim, table.dim, table.inv_norm[u], q)
                                : -std::numeric_limits<double>::infinity();
  }
}

void pagerank_pull_serial(const PullGraph& g, std::span<const double> current, double base,
                          double damping, std::span<double> next, std::span<double> diff) {
  for (std::size_t v = 0; v < g.nodes(); ++v) pull_one(g, current, base, damping, v, next, diff);
}

void pagerank_pull_omp(const PullGraph& g, std::span<const double> current, double base,
                       double damping, std::span<double> next, std::span<double> diff) {
  const auto n = static_cast<std::ptrdiff_t>(g.nodes());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < n; ++v)
    pull_one(g, current, base, damping, static_cast<std::size_t>(v), next, diff);
}

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace cuelex::kernels
