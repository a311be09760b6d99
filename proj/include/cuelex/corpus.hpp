#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cuelex {

enum class MatchKind { literal, prefix_wildcard, phrase };

/// A cue as it is matched against tokenized text. `tokens` holds the folded
/// literal, the wildcard stem, or the phrase words; `label` is the surface
/// form the user wrote ("surpris*", "ought to").
struct MatchPattern {
  MatchKind kind = MatchKind::literal;
  std::string label;
  std::vector<std::string> tokens;

  /// Trailing '*' marks a prefix wildcard, inner whitespace a phrase.
  static MatchPattern parse(std::string_view text);

  bool operator==(const MatchPattern&) const = default;
};

std::vector<MatchPattern> parse_patterns(const std::vector<std::string>& words);

/// The five-word query used for discipline rates and the default S+ indicators.
const std::vector<std::string>& consensus_failure_cues();

const std::vector<std::string>& default_abbreviations();

/// Splits at '.', '!' or '?' followed by whitespace and an uppercase letter,
/// unless the text before the boundary ends in a listed abbreviation.
std::vector<std::string> segment(std::string_view text,
                                 const std::vector<std::string>& abbreviations = default_abbreviations());

/// Splits on Unicode whitespace and strips leading/trailing punctuation;
/// inner hyphens and apostrophes survive. Surfaces keep their case.
std::vector<std::string> tokenize(std::string_view text);

bool match(const MatchPattern& pattern, const std::vector<std::string>& folded_tokens);

/// Number of match positions: equal tokens, stem-prefixed tokens, or phrase
/// start offsets.
std::size_t count_matches(const MatchPattern& pattern, const std::vector<std::string>& folded_tokens);

struct Sentence {
  std::string text;
  std::vector<std::string> surface;
  std::vector<std::string> tokens;  // folded
};

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
};

/// Tokenized sentences grouped by document. Documents ids are unique and no
/// sentence is empty.
struct SentenceCorpus {
  std::vector<Document> documents;

  std::size_t sentence_count() const;
  std::size_t token_count() const;
};

struct RawDocument {
  std::string doc_id;
  std::string text;
};

/// Segments and tokenizes each document; parallel per document, output in
/// input order. Throws InputError on duplicate ids.
SentenceCorpus build_corpus(const std::vector<RawDocument>& docs);

/// Reads JSON-lines ({"id", "text"}) or a directory of .txt files whose stem
/// is the doc id (sorted by file name).
std::vector<RawDocument> read_raw_documents(const std::filesystem::path& path);
SentenceCorpus load_corpus(const std::filesystem::path& path);

struct CollectionItem {
  std::string doc_id;
  std::vector<std::string> tokens;  // folded
};

struct DocumentCollection {
  std::string group_id;
  std::vector<CollectionItem> items;
};

DocumentCollection make_collection(std::string group_id, const std::vector<RawDocument>& docs);

/// Manifest lines are "group_id<TAB>path"; relative paths resolve against
/// the manifest's directory. '#' starts a comment.
std::vector<DocumentCollection> load_collections(const std::filesystem::path& manifest);

struct SentenceRef {
  std::size_t doc = 0;
  std::size_t sentence = 0;

  auto operator<=>(const SentenceRef&) const = default;
};

struct SplitResult {
  std::vector<SentenceRef> s_plus;
  std::vector<SentenceRef> s_minus;
  std::vector<MatchPattern> indicators;
};

struct SplitOptions {
  /// When set, the larger side is down-sampled to the smaller side's size
  /// by a shuffle seeded with this value.
  std::optional<std::uint64_t> balance_seed;
};

SplitResult split_corpus(const SentenceCorpus& corpus, const std::vector<MatchPattern>& indicators,
                         const SplitOptions& options = {});

struct RatioRow {
  std::string word;
  std::size_t n_plus = 0;
  double pct_plus = 0.0;
  std::size_t n_minus = 0;
  double pct_minus = 0.0;
  /// +infinity when the word never occurs in S- but does in S+; NaN when it
  /// occurs in neither.
  double ratio = 0.0;
};

RatioRow ratio_row(std::string word, std::size_t n_plus, std::size_t size_plus,
                   std::size_t n_minus, std::size_t size_minus);

/// Rows sorted by ratio descending (infinite first, undefined last).
std::vector<RatioRow> ratio_table(const std::vector<MatchPattern>& words, const SplitResult& split,
                                  const SentenceCorpus& corpus);
void sort_ratio_rows(std::vector<RatioRow>& rows);

struct RelativeScore {
  std::string word;
  std::size_t hits = 0;
  double score = 0.0;
};

/// Document-hit count of each word divided by that of the baseline, in
/// input order.
std::vector<RelativeScore> relative_scores(const DocumentCollection& collection,
                                           const std::vector<MatchPattern>& words,
                                           const MatchPattern& baseline = MatchPattern::parse("knowledge"));

struct RateRow {
  std::string group;
  std::size_t matched = 0;
  std::size_t total = 0;
  double rate = 0.0;
};

RateRow rate_row(std::string group, std::size_t matched, std::size_t total);

/// Share of items per group matching any query pattern, sorted by rate
/// descending then group.
std::vector<RateRow> uncertainty_rate(const std::vector<DocumentCollection>& groups,
                                      const std::vector<MatchPattern>& query);

struct SentenceMatch {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::string sentence;
  std::vector<std::string> cues;
};

/// Sentences matching at least one cue in (document, sentence) order. Each
/// cue is charged for at most `limit` rows; a sentence is kept while any of
/// its cues still has quota.
std::vector<SentenceMatch> find_sentences(const SentenceCorpus& corpus,
                                          const std::vector<MatchPattern>& cues, std::size_t limit);

}  // namespace cuelex
