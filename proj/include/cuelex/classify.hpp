#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cuelex/embedding_store.hpp"
#include "cuelex/expansion.hpp"

namespace cuelex {

enum class Label { neg = 0, pos = 1 };

struct Annotation {
  std::string word;
  Label judge1 = Label::neg;
  Label judge2 = Label::neg;
};

/// CSV with header "word,judge1,judge2", values "pos"/"neg".
std::vector<Annotation> read_annotations(const std::filesystem::path& path);
std::vector<Annotation> parse_annotations(std::istream& in, std::string_view source = "annotations");

// --- agreement ---

struct AgreementCounts {
  std::size_t pp = 0;  // judge1 pos, judge2 pos
  std::size_t pn = 0;  // judge1 pos, judge2 neg
  std::size_t np = 0;  // judge1 neg, judge2 pos
  std::size_t nn = 0;

  std::size_t total() const { return pp + pn + np + nn; }
};

struct AgreementReport {
  AgreementCounts counts;
  double percent_agreement = 0.0;
  double expected_agreement = 0.0;
  double kappa = 0.0;
  std::string band;
};

/// Landis-Koch strength-of-agreement label for a kappa value.
std::string_view landis_koch_band(double kappa);

/// Cohen's kappa from the 2x2 table. Throws InputError on fewer than two
/// items or when chance agreement is 1 (kappa undefined).
AgreementReport agreement(const AgreementCounts& counts);
AgreementReport agreement(const std::vector<Annotation>& annotations);

// --- dataset ---

struct FeatureVector {
  std::vector<float> values;
  std::vector<bool> oov;  // per model
};

/// Concatenates each model's stored vector in model order; models lacking
/// the word contribute zeros and set their flag. Throws InputError when no
/// model knows the word.
FeatureVector featurize(std::string_view word, const std::vector<const EmbeddingModel*>& models);

struct LabeledExample {
  std::string word;
  std::vector<float> features;
  Label label = Label::neg;
  std::vector<bool> oov;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  std::size_t feature_dim = 0;
  std::vector<std::string> excluded;  // unknown to every model

  std::size_t positives() const;
  std::size_t negatives() const { return examples.size() - positives(); }
};

inline constexpr std::uint64_t kDatasetShuffleSeed = 20160409;

/// Positives are accepted words (plus `seeds` when given), negatives are
/// rejected and unrelated words. Lists must be disjoint. The result is
/// shuffled with kDatasetShuffleSeed.
Dataset build_dataset(const std::vector<std::string>& accepted,
                      const std::vector<std::string>& rejected,
                      const std::vector<std::string>& unrelated,
                      const std::vector<const EmbeddingModel*>& models,
                      const std::vector<std::string>* seeds = nullptr);

/// Draws n distinct vocabulary tokens whose cosine to every usable seed
/// model form stays below max_sim, scanning in a seeded random order.
/// Tokens in `exclude` or the lexicon are skipped, as are tokens whose
/// folded form was already drawn.
std::vector<std::string> sample_unrelated(const EmbeddingModel& model, const SeedLexicon& lexicon,
                                          std::size_t n, double max_sim, std::uint64_t rng_seed,
                                          const std::set<std::string>& exclude = {});

void write_dataset_tsv(std::ostream& out, const Dataset& ds);
Dataset read_dataset_tsv(const std::filesystem::path& path);

// --- folds and classifiers ---

/// Test-fold index per example, stratified by label: each class is
/// shuffled and dealt round-robin, so fold sizes differ by at most one.
std::vector<std::size_t> kfold(const std::vector<Label>& labels, std::size_t k, std::uint64_t rng_seed);
std::vector<std::size_t> kfold(const Dataset& ds, std::size_t k, std::uint64_t rng_seed);

/// FNV-1a digest of a fold assignment, hex encoded.
std::string fold_digest(const std::vector<std::size_t>& folds);

enum class ClassifierKind { knn, gaussian_naive_bayes, logistic_sgd, mlp };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::knn;
  std::size_t knn_k = 1;
  double learning_rate = 0.0005;
  std::size_t epochs = 500;
  std::size_t batch_size = 100;
  std::size_t hidden_width = 6;
  std::uint64_t rng_seed = 0;

  std::string name() const;
  /// "knn", "knn:k=5", "nb", "logistic", "mlp:hidden=6,epochs=200", ...
  static ClassifierSpec parse(std::string_view text);
};

/// Dense row-major feature rows.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double* row(std::size_t r) { return data.data() + r * cols; }
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const Matrix& x, const std::vector<Label>& y) = 0;
  virtual std::vector<Label> predict(const Matrix& x) const = 0;
};

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& o);
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when a ratio had a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

/// Positive class = valid uncertainty cue word. Throws InputError on an
/// empty confusion matrix.
Metrics metrics(const Confusion& c);

struct EvalReport {
  std::string classifier;
  Confusion confusion;
  Metrics metrics;
  std::string fold_digest;
  std::size_t folds = 0;
};

/// Trains on k-1 folds and predicts the held-out fold, pooling one
/// confusion matrix across folds. Folds run in parallel; fold f trains
/// with rng_seed + f.
EvalReport train_eval(const Dataset& ds, const ClassifierSpec& spec,
                      const std::vector<std::size_t>& folds);

Matrix to_matrix(const Dataset& ds, const std::vector<std::size_t>& rows);

}  // namespace cuelex
