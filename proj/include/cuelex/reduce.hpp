#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cuelex {

/// Words (rows) by collections (columns) score table.
struct ScoreMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Eigen::MatrixXd values;

  /// Throws InputError unless labels match the shape and are unique and
  /// every entry is finite and non-negative.
  void validate() const;
};

/// Header: corner cell then collection names; each row: word then values.
ScoreMatrix read_score_matrix(const std::filesystem::path& path);
void write_score_matrix(std::ostream& out, const ScoreMatrix& m);

struct PcaResult {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;  // columns kept
  std::vector<std::string> dropped_columns;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;        // ones when not standardized
  Eigen::MatrixXd components;   // columns-kept x n_components, orthonormal
  Eigen::MatrixXd loadings;     // rows x n_components
  std::vector<double> explained_variance_ratio;
  bool standardized = true;
};

/// Eigen-decomposition of the covariance (or, standardized, correlation)
/// matrix of the columns. Loadings are row projections divided by
/// sqrt(n - 1); each component is oriented so its largest-magnitude
/// loading is positive. Zero-variance columns are dropped when
/// standardizing.
PcaResult pca(const ScoreMatrix& matrix, std::size_t n_components = 7, bool standardize = true);

/// Centered (and scaled) input rebuilt from loadings and components.
Eigen::MatrixXd reconstruct(const PcaResult& result);

struct TopLoading {
  std::string word;
  double loading = 0.0;
};

/// The m rows with the largest |loading| on a component.
std::vector<TopLoading> top_loadings(const PcaResult& result, std::size_t component, std::size_t m);

/// (sum |a_i - b_i|^p)^(1/p); throws InputError on length mismatch or p < 1.
double minkowski(std::span<const double> a, std::span<const double> b, double p);

struct MdsResult {
  std::vector<std::string> labels;
  Eigen::MatrixXd coordinates;  // items x dims, centered
  Eigen::MatrixXd dissimilarities;
  double stress = 0.0;
  std::size_t iterations = 0;
  /// Raw stress of the starting configuration, then after every accepted
  /// Guttman update.
  std::vector<double> stress_trace;
};

/// Metric SMACOF over the columns (items) of the matrix, with Minkowski
/// dissimilarities between column profiles and a classical-scaling start.
MdsResult mds(const ScoreMatrix& matrix, double p = 2.0, std::size_t dims = 2,
              std::size_t max_iter = 500, double tol = 1e-9);

/// SMACOF on a precomputed symmetric dissimilarity matrix.
MdsResult smacof(const Eigen::MatrixXd& dissimilarities, std::vector<std::string> labels,
                 std::size_t dims = 2, std::size_t max_iter = 500, double tol = 1e-9);

double raw_stress(const Eigen::MatrixXd& coordinates, const Eigen::MatrixXd& dissimilarities);

}  // namespace cuelex
