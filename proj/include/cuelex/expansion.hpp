#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cuelex/common.hpp"
#include "cuelex/corpus.hpp"
#include "cuelex/embedding_store.hpp"

namespace cuelex {

enum class SourceTag { hedging, scientific, custom };
std::string_view to_string(SourceTag t);

struct SeedEntry {
  std::string surface;
  MatchKind match_kind = MatchKind::literal;
  /// Tokens sent to the embedding models. Wildcards are never queried
  /// directly; phrases default to their underscore form.
  std::vector<std::string> model_forms;
  SourceTag source_tag = SourceTag::custom;

  MatchPattern pattern() const { return MatchPattern::parse(surface); }
};

/// Seed cue words; surfaces are unique after case folding.
class SeedLexicon {
 public:
  SeedLexicon() = default;

  /// Fills default model forms and validates; throws InputError on a
  /// duplicate surface or a wildcard without explicit forms.
  void add(SeedEntry entry);

  const std::vector<SeedEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Entry whose folded surface equals `folded`, if any.
  const SeedEntry* find(std::string_view folded) const;

  /// Folded surfaces plus folded model forms; never valid candidates.
  const std::set<std::string>& excluded_words() const { return excluded_; }

 private:
  std::vector<SeedEntry> entries_;
  std::map<std::string, std::size_t> by_folded_;
  std::set<std::string> excluded_;
};

/// Lines: surface[<TAB>source_tag[<TAB>form,form,...]]; '#' starts a comment.
SeedLexicon parse_lexicon(std::istream& in);
SeedLexicon load_lexicon(const std::filesystem::path& path);

struct CandidatePair {
  std::string seed;       // folded seed surface
  std::string candidate;  // folded neighbor
  double similarity = 0.0;
  std::string model_name;
  // Tokens actually compared, so the similarity can be recomputed.
  std::string query_form;
  std::string neighbor_token;
};

struct SkippedSeed {
  std::string surface;
  std::string form;
};

struct ExpansionResult {
  std::vector<CandidatePair> pairs;
  std::vector<SkippedSeed> skipped;
};

/// One hop of neighborhood retrieval per seed model form. Pairs whose
/// candidate is itself a seed are dropped; a (seed, candidate) reached via
/// several forms keeps its best similarity. Sorted by (seed, similarity
/// desc, candidate).
ExpansionResult expand(const EmbeddingModel& model, const SeedLexicon& lexicon, std::size_t k = 50,
                       Exec exec = Exec::parallel);

std::set<std::string> distinct_candidates(const std::vector<CandidatePair>& pairs);

struct ModelEvidence {
  double best_similarity = 0.0;
  std::vector<std::string> seeds;  // sorted, unique
};

/// Marker for absent scores; `no_evidence` explains which part is missing.
struct Candidate {
  std::string word;
  std::map<std::string, ModelEvidence> evidence;  // by model name
  std::optional<double> pmi;
  std::optional<double> tfidf;
  bool no_evidence = false;
  Status status = Status::unrated;

  std::vector<std::string> contributing_seeds() const;
};

struct CandidateSet {
  std::vector<Candidate> candidates;  // unique words, sorted

  const Candidate* find(std::string_view word) const;
};

/// (a ∩ b) minus the lexicon's excluded words, sorted, all unrated.
CandidateSet intersect(const std::set<std::string>& a, const std::set<std::string>& b,
                       const SeedLexicon& lexicon);

/// Same word set as the token-set overload, with per-model provenance
/// taken from the two pair lists.
CandidateSet intersect(const std::vector<CandidatePair>& a, const std::vector<CandidatePair>& b,
                       const SeedLexicon& lexicon);

/// Raised when a pattern never occurs in the scoring corpus.
class InsufficientEvidence : public InputError {
 public:
  using InputError::InputError;
};

/// ln((n_xy / n_x) / (n_y / N)) over sentence-level occurrence. Returns
/// -infinity when x and y never co-occur; throws InsufficientEvidence when
/// either never occurs.
double pmi(const SentenceCorpus& corpus, const MatchPattern& x, const MatchPattern& y);

/// (cf / T) * ln(N_docs / df). Throws InsufficientEvidence when df == 0.
double tfidf(const SentenceCorpus& corpus, const MatchPattern& word);

/// Pattern for a candidate token; Google News phrase tokens ("not_sure")
/// become phrases.
MatchPattern candidate_pattern(std::string_view word);

/// Attaches tfidf and the maximum pmi over contributing seeds. Scores never
/// remove candidates.
CandidateSet score_candidates(CandidateSet set, const SentenceCorpus& corpus,
                              const SeedLexicon& lexicon);

// --- files ---

void write_pairs_tsv(std::ostream& out, const std::vector<CandidatePair>& pairs);
std::vector<CandidatePair> read_pairs_tsv(const std::filesystem::path& path);

}  // namespace cuelex
