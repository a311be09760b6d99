#include "cuelex/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <string_view>

#include <spdlog/spdlog.h>

#include "cuelex/common.hpp"

namespace cuelex {

namespace {

std::vector<std::string_view> split_tabs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  while (true) {
    const auto e = s.find('\t', b);
    out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) return out;
    b = e + 1;
  }
}

/// Eigenpairs of a symmetric matrix, largest eigenvalue first.
void sorted_eigen(const Eigen::MatrixXd& sym, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition failed");
  values = solver.eigenvalues().reverse();
  vectors = solver.eigenvectors().rowwise().reverse();
}

Eigen::Index argmax_abs(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
  return best;
}

}  // namespace

void ScoreMatrix::validate() const {
  if (static_cast<Eigen::Index>(row_labels.size()) != values.rows() ||
      static_cast<Eigen::Index>(col_labels.size()) != values.cols())
    throw InputError("score matrix labels do not match its shape");
  if (std::set<std::string>(row_labels.begin(), row_labels.end()).size() != row_labels.size())
    throw InputError("score matrix has duplicate row labels");
  if (std::set<std::string>(col_labels.begin(), col_labels.end()).size() != col_labels.size())
    throw InputError("score matrix has duplicate column labels");
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      if (!std::isfinite(values(r, c)) || values(r, c) < 0.0)
        throw InputError("score matrix entry for '" + row_labels[static_cast<std::size_t>(r)] +
                         "' is negative or non-finite");
}

ScoreMatrix read_score_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open score matrix " + path.string());
  ScoreMatrix m;
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split_tabs(line);
    if (!header) {
      if (f.size() < 2) throw InputError(path.string() + ": header needs at least one collection");
      for (std::size_t i = 1; i < f.size(); ++i) m.col_labels.emplace_back(f[i]);
      header = true;
      continue;
    }
    if (f.size() != m.col_labels.size() + 1)
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    m.row_labels.emplace_back(f[0]);
    std::vector<double> vals;
    for (std::size_t i = 1; i < f.size(); ++i) {
      try {
        vals.push_back(std::stod(std::string(f[i])));
      } catch (const std::exception&) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad number");
      }
    }
    rows.push_back(std::move(vals));
  }
  if (!header) throw InputError(path.string() + ": empty score matrix");
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.col_labels.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  m.validate();
  return m;
}

void write_score_matrix(std::ostream& out, const ScoreMatrix& m) {
  out << "word";
  for (const auto& c : m.col_labels) out << '\t' << c;
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    out << m.row_labels[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m.values(r, c));
      out << '\t' << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// PCA

PcaResult pca(const ScoreMatrix& matrix, std::size_t n_components, bool standardize) {
  matrix.validate();
  const Eigen::Index n = matrix.values.rows();
  if (n < 2) throw InputError("pca needs at least two rows");

  PcaResult r;
  r.row_labels = matrix.row_labels;
  r.standardized = standardize;
  std::vector<Eigen::Index> keep;
  const Eigen::VectorXd col_mean = matrix.values.colwise().mean();
  Eigen::VectorXd col_sd(matrix.values.cols());
  for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) {
    const double ss = (matrix.values.col(c).array() - col_mean(c)).square().sum();
    col_sd(c) = std::sqrt(ss / static_cast<double>(n - 1));
    if (standardize && !(col_sd(c) > 1e-12)) {
      r.dropped_columns.push_back(matrix.col_labels[static_cast<std::size_t>(c)]);
      continue;
    }
    keep.push_back(c);
    r.col_labels.push_back(matrix.col_labels[static_cast<std::size_t>(c)]);
  }
  if (!r.dropped_columns.empty())
    spdlog::warn("pca: dropped {} zero-variance column(s)", r.dropped_columns.size());
  const auto p = static_cast<Eigen::Index>(keep.size());
  if (n_components == 0 || static_cast<Eigen::Index>(n_components) > std::min(n, p))
    throw InputError("n_components must lie in [1, min(rows, usable columns)] = [1, " +
                     std::to_string(std::min(n, p)) + "]");

  Eigen::MatrixXd x(n, p);
  r.mean.resize(p);
  r.scale.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::Index c = keep[static_cast<std::size_t>(j)];
    r.mean(j) = col_mean(c);
    r.scale(j) = standardize ? col_sd(c) : 1.0;
    x.col(j) = (matrix.values.col(c).array() - r.mean(j)) / r.scale(j);
  }

  const double denom = static_cast<double>(n - 1);
  const Eigen::MatrixXd cov = (x.transpose() * x) / denom;
  Eigen::VectorXd eigval;
  Eigen::MatrixXd eigvec;
  sorted_eigen(cov, eigval, eigvec);
  const double total = eigval.cwiseMax(0.0).sum();

  const auto m = static_cast<Eigen::Index>(n_components);
  r.components = eigvec.leftCols(m);
  r.loadings = (x * r.components) / std::sqrt(denom);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index lead = argmax_abs(r.loadings.col(k));
    if (r.loadings(lead, k) < 0.0) {
      r.loadings.col(k) *= -1.0;
      r.components.col(k) *= -1.0;
    }
    r.explained_variance_ratio.push_back(total > 0.0 ? std::max(eigval(k), 0.0) / total : 0.0);
  }
  return r;
}

Eigen::MatrixXd reconstruct(const PcaResult& result) {
  const double denom = static_cast<double>(result.loadings.rows() - 1);
  return std::sqrt(denom) * result.loadings * result.components.transpose();
}

std::vector<TopLoading> top_loadings(const PcaResult& result, std::size_t component, std::size_t m) {
  if (static_cast<Eigen::Index>(component) >= result.loadings.cols())
    throw InputError("component index out of range");
  const auto col = result.loadings.col(static_cast<Eigen::Index>(component));
  std::vector<std::size_t> idx(static_cast<std::size_t>(col.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(col(static_cast<Eigen::Index>(a))) > std::abs(col(static_cast<Eigen::Index>(b)));
  });
  idx.resize(std::min(m, idx.size()));
  std::vector<TopLoading> out;
  for (std::size_t i : idx) out.push_back({result.row_labels[i], col(static_cast<Eigen::Index>(i))});
  return out;
}

// ---------------------------------------------------------------------------
// MDS

double minkowski(std::span<const double> a, std::span<const double> b, double p) {
  if (a.size() != b.size()) throw InputError("minkowski: vectors differ in length");
  if (!(p >= 1.0)) throw InputError("minkowski: p must be >= 1");
  double s = 0.0;
  if (std::isinf(p)) {
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
  }
  if (p == 2.0) {
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }
  for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(s, 1.0 / p);
}

double raw_stress(const Eigen::MatrixXd& x, const Eigen::MatrixXd& delta) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double d = (x.row(i) - x.row(j)).norm() - delta(i, j);
      s += d * d;
    }
  return s;
}

MdsResult smacof(const Eigen::MatrixXd& delta, std::vector<std::string> labels, std::size_t dims,
                 std::size_t max_iter, double tol) {
  const Eigen::Index n = delta.rows();
  if (n < 3) throw InputError("mds needs at least three items");
  if (delta.cols() != n) throw InputError("dissimilarity matrix must be square");
  if (dims == 0) throw InputError("mds needs at least one output dimension");
  if (delta.maxCoeff() <= 0.0) throw InputError("all dissimilarities are zero");

  // Classical (Torgerson) scaling start.
  const Eigen::MatrixXd d2 = delta.array().square().matrix();
  const Eigen::MatrixXd j =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd b = -0.5 * j * d2 * j;
  Eigen::VectorXd eigval;
  Eigen::MatrixXd eigvec;
  sorted_eigen(b, eigval, eigvec);
  const auto k = static_cast<Eigen::Index>(dims);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index c = 0; c < std::min(k, n); ++c) {
    x.col(c) = eigvec.col(c) * std::sqrt(std::max(eigval(c), 0.0));
    const Eigen::Index lead = argmax_abs(x.col(c));
    if (x(lead, c) < 0.0) x.col(c) *= -1.0;
  }

  MdsResult r;
  r.labels = std::move(labels);
  r.dissimilarities = delta;
  double stress = raw_stress(x, delta);
  r.stress_trace.push_back(stress);
  Eigen::MatrixXd bx(n, n);
  for (std::size_t it = 0; it < max_iter && stress > 0.0; ++it) {
    bx.setZero();
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (a == c) continue;
        const double dist = (x.row(a) - x.row(c)).norm();
        if (dist > 0.0) bx(a, c) = -delta(a, c) / dist;
      }
      bx(a, a) = -bx.row(a).sum();
    }
    Eigen::MatrixXd next = (bx * x) / static_cast<double>(n);
    const double next_stress = raw_stress(next, delta);
    // Majorization never raises stress; a rise is rounding at convergence.
    if (next_stress > stress) break;
    x = std::move(next);
    ++r.iterations;
    const double gain = stress - next_stress;
    stress = next_stress;
    r.stress_trace.push_back(stress);
    if (gain < tol) break;
  }
  x.rowwise() -= x.colwise().mean();
  r.coordinates = std::move(x);
  r.stress = stress;
  return r;
}

MdsResult mds(const ScoreMatrix& matrix, double p, std::size_t dims, std::size_t max_iter, double tol) {
  matrix.validate();
  const Eigen::Index n = matrix.values.cols();
  if (n < 3) throw InputError("mds needs at least three collections");
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::VectorXd v = matrix.values.col(c);
    cols[static_cast<std::size_t>(c)].assign(v.data(), v.data() + v.size());
  }
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      delta(a, b) = delta(b, a) =
          minkowski(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)], p);
  return smacof(delta, matrix.col_labels, dims, max_iter, tol);
}

}  // namespace cuelex
