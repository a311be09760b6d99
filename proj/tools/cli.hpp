#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuelex/classify.hpp"
#include "cuelex/embedding_store.hpp"
#include "cuelex/expansion.hpp"

namespace cuelex::cli {

/// Every flag of every subcommand. A JSON config file may set any of them
/// under the flag's long name; flags given on the command line win.
struct RunConfig {
  std::vector<std::string> models;
  std::vector<std::string> model_formats;
  std::string vocab_filter;
  std::string seeds;
  std::size_t k = 50;
  std::vector<std::string> pairs;
  std::string candidates;
  std::string corpus;
  std::string collections;
  std::vector<std::string> indicators;
  std::vector<std::string> words;
  std::string baseline = "knowledge";
  std::size_t limit = 10;
  bool balance = false;
  std::string annotations;
  std::string nodes;
  std::string edges;
  double augment_threshold = 0.0;
  double resolution = 1.0;
  double damping = 0.85;
  double tol = 1e-9;
  std::size_t max_iter = 1000;
  std::string format = "gexf";
  std::string dataset;
  bool include_seeds = false;
  std::size_t unrelated = 100;
  double max_sim = 0.2;
  std::size_t folds = 10;
  std::vector<std::string> classifiers = {"knn", "nb", "logistic", "mlp"};
  std::string matrix;
  std::size_t components = 7;
  bool no_standardize = false;
  std::size_t top = 10;
  double p = 2.0;
  std::size_t dims = 2;
  std::size_t mds_max_iter = 500;

  std::uint64_t rng_seed = 0;
  std::string out = ".";
  int threads = 0;
  bool reproducible = false;
  std::string config;

  /// Canonical JSON of the settings that shape results (not out, threads,
  /// reproducible or the config path itself).
  nlohmann::json to_json() const;
  std::string digest() const;
};

/// Writes artifacts into the output directory, each stamped with the run
/// header. Refuses to overwrite any registered input file.
class Outputs {
 public:
  Outputs(const RunConfig& cfg, std::string command);

  void add_input(const std::string& path);

  /// TSV/CSV and other line formats: "# <header>" first.
  void text(const std::string& name, const std::function<void(std::ostream&)>& body);
  /// JSON object with a "meta" member prepended.
  void json(const std::string& name, nlohmann::json body);
  /// XML with the header as a comment after the declaration.
  void xml(const std::string& name, const std::function<void(std::ostream&)>& body);

  const std::string& header() const { return header_; }
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path target(const std::string& name);
  void put(const std::filesystem::path& path, const std::string& bytes);

  std::filesystem::path dir_;
  std::string header_;
  nlohmann::json meta_;
  std::set<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> written_;
};

struct NamedModel {
  std::string name;
  std::filesystem::path path;
};

std::vector<NamedModel> model_specs(const RunConfig& cfg);
std::vector<EmbeddingModel> load_models(const RunConfig& cfg, const SeedLexicon* lexicon,
                                        const std::set<std::string>& extra_words = {});

/// Expands "@file" entries into the file's non-comment lines.
std::vector<std::string> expand_list(const std::vector<std::string>& items);

nlohmann::json pair_json(const CandidatePair& p);
nlohmann::json candidates_json(const CandidateSet& set);
CandidateSet candidates_from_json(const nlohmann::json& j);
void write_candidates_tsv(std::ostream& out, const CandidateSet& set);
void write_review_csv(std::ostream& out, const CandidateSet& set);

std::string fixed(double v, int decimals);

// Subcommands; each returns the process exit status.
int cmd_expand(const RunConfig& cfg);
int cmd_intersect(const RunConfig& cfg);
int cmd_score(const RunConfig& cfg);
int cmd_pipeline(const RunConfig& cfg);
int cmd_split(const RunConfig& cfg);
int cmd_ratios(const RunConfig& cfg);
int cmd_relscore(const RunConfig& cfg);
int cmd_rates(const RunConfig& cfg);
int cmd_find(const RunConfig& cfg);
int cmd_graph(const RunConfig& cfg);
int cmd_cluster(const RunConfig& cfg);
int cmd_rank(const RunConfig& cfg);
int cmd_export(const RunConfig& cfg);
int cmd_agree(const RunConfig& cfg);
int cmd_dataset(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_pca(const RunConfig& cfg);
int cmd_mds(const RunConfig& cfg);

int run(int argc, char** argv);

}  // namespace cuelex::cli
