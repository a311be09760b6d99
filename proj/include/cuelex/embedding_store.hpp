#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cuelex/kernels.hpp"

namespace cuelex {

enum class ModelFormat { binary, text };
ModelFormat parse_model_format(std::string_view text);

/// Selects the OpenMP kernel or its serial reference.
enum class Exec { serial, parallel };

/// Norms below this are treated as zero vectors and never returned by queries.
inline constexpr double kUnusableNorm = 1e-12;

/// Immutable vocabulary plus vector matrix loaded from a word2vec file.
/// Safe for concurrent readers once constructed.
class EmbeddingModel {
 public:
  /// Throws InputError on dim == 0, empty vocabulary, shape mismatch,
  /// duplicate tokens or non-finite entries.
  EmbeddingModel(std::string name, std::size_t dim, std::vector<std::string> vocab,
                 std::vector<float> vectors);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vocab_.size(); }

  const std::string& token(std::size_t i) const { return vocab_[i]; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::span<const float> vector(std::size_t i) const {
    return {vectors_.data() + i * dim_, dim_};
  }
  double norm(std::size_t i) const { return norms_[i]; }
  bool usable(std::size_t i) const { return usable_[i] != 0; }

  std::optional<std::size_t> find(std::string_view token) const;

  /// Exact lookup first; with fold_case, falls back to the first case
  /// variant in file order.
  std::optional<std::size_t> resolve(std::string_view token, bool fold_case) const;

  /// Indices of every token whose folded form equals `folded_key`, file order.
  std::span<const std::size_t> case_variants(const std::string& folded_key) const;

  kernels::VectorTable table() const {
    return {vectors_, dim_, inv_norms_, usable_};
  }

  /// Number of duplicate records dropped by the loader.
  std::size_t duplicates_dropped() const { return duplicates_dropped_; }
  void set_duplicates_dropped(std::size_t n) { duplicates_dropped_ = n; }

 private:
  std::string name_;
  std::size_t dim_;
  std::vector<std::string> vocab_;
  std::vector<float> vectors_;
  std::vector<double> norms_;
  std::vector<double> inv_norms_;
  std::vector<std::uint8_t> usable_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::size_t>> folded_;
  std::size_t duplicates_dropped_ = 0;
};

struct NeighborResult {
  std::string query;
  std::string neighbor;
  double similarity = 0.0;

  bool operator==(const NeighborResult&) const = default;
};

struct LoadOptions {
  ModelFormat format = ModelFormat::binary;
  /// Model name; defaults to the file stem.
  std::string name;
  /// Tokens to keep, compared after case folding. Unset keeps everything.
  std::optional<std::unordered_set<std::string>> vocab_filter;
};

/// Reads a word2vec binary or text model. Duplicate tokens keep their first
/// occurrence and produce one warning with the count.
EmbeddingModel load_model(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes the model in word2vec binary (bit-exact floats) or text form.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path,
                ModelFormat format);

/// Cosine of two stored vectors: both normalized, then dotted in index
/// order, so cosine(a, b) == cosine(b, a) exactly.
double cosine(const EmbeddingModel& model, std::size_t a, std::size_t b);
double cosine(const EmbeddingModel& model, std::string_view w1, std::string_view w2);

/// Exhaustive k nearest neighbors ordered by (similarity desc, token asc).
/// The query is excluded, and with fold_case so are its case variants;
/// results are then deduplicated by folded key keeping the best variant.
std::vector<NeighborResult> top_k(const EmbeddingModel& model, std::string_view query,
                                  std::size_t k, bool fold_case = true,
                                  Exec exec = Exec::parallel);

/// Unit vector of row i in double precision, the query side of the scan.
std::vector<double> unit_vector(const EmbeddingModel& model, std::size_t i);

}  // namespace cuelex
