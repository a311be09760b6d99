#include "cuelex/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cuelex/common.hpp"

namespace cuelex {

namespace {

/// Byte length of the Unicode whitespace code point starting at text[i], or 0.
std::size_t whitespace_len(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') return 1;
  auto at = [&](std::size_t k) {
    return i + k < text.size() ? static_cast<unsigned char>(text[i + k]) : 0u;
  };
  if (c == 0xC2 && (at(1) == 0xA0 || at(1) == 0x85)) return 2;
  if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;
  if (c == 0xE2 && at(1) == 0x80 && ((at(2) >= 0x80 && at(2) <= 0x8A) || at(2) == 0xA8 ||
                                      at(2) == 0xA9 || at(2) == 0xAF))
    return 3;
  if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;
  if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;
  return 0;
}

/// Byte length of a punctuation code point at text[i]: ASCII punctuation
/// plus typographic quotes, dashes and the ellipsis.
std::size_t punct_len_at(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c < 0x80) return std::ispunct(c) ? 1 : 0;
  if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80) {
    const auto c2 = static_cast<unsigned char>(text[i + 2]);
    if ((c2 >= 0x93 && c2 <= 0x9F) || c2 == 0xA6) return 3;
  }
  if (c == 0xC2 && i + 1 < text.size()) {
    const auto c1 = static_cast<unsigned char>(text[i + 1]);
    if (c1 == 0xAB || c1 == 0xBB) return 2;
  }
  return 0;
}

/// Same test for the code point that ends at text[end - 1].
std::size_t punct_len_before(std::string_view text, std::size_t end) {
  for (std::size_t len = 1; len <= 3 && len <= end; ++len) {
    const std::size_t start = end - len;
    const auto c = static_cast<unsigned char>(text[start]);
    if ((c & 0xC0) == 0x80) continue;  // continuation byte
    return punct_len_at(text, start) == len ? len : 0;
  }
  return 0;
}

std::string strip_punct(std::string_view tok) {
  std::size_t b = 0;
  std::size_t e = tok.size();
  while (b < e) {
    const std::size_t n = punct_len_at(tok, b);
    if (n == 0) break;
    b += n;
  }
  while (e > b) {
    const std::size_t n = punct_len_before(tok, e);
    if (n == 0) break;
    e -= n;
  }
  return std::string(tok.substr(b, e - b));
}

bool ends_with_abbreviation(std::string_view head, const std::vector<std::string>& abbreviations) {
  for (const auto& abbr : abbreviations) {
    if (abbr.empty() || head.size() < abbr.size()) continue;
    if (head.substr(head.size() - abbr.size()) != abbr) continue;
    const std::size_t start = head.size() - abbr.size();
    if (start == 0) return true;
    const auto prev = static_cast<unsigned char>(head[start - 1]);
    if (!std::isalnum(prev)) return true;
  }
  return false;
}

Sentence make_sentence(std::string text) {
  Sentence s;
  s.surface = tokenize(text);
  s.tokens.reserve(s.surface.size());
  for (const auto& t : s.surface) s.tokens.push_back(fold(t));
  s.text = std::move(text);
  return s;
}

bool matches_at(const MatchPattern& p, const std::vector<std::string>& toks, std::size_t i) {
  switch (p.kind) {
    case MatchKind::literal: return toks[i] == p.tokens.front();
    case MatchKind::prefix_wildcard: return toks[i].starts_with(p.tokens.front());
    case MatchKind::phrase:
      if (i + p.tokens.size() > toks.size()) return false;
      for (std::size_t k = 0; k < p.tokens.size(); ++k)
        if (toks[i + k] != p.tokens[k]) return false;
      return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Patterns and tokenization

MatchPattern MatchPattern::parse(std::string_view text) {
  const std::string_view t = trim(text);
  MatchPattern p;
  p.label = std::string(t);
  if (t.ends_with('*')) {
    const std::string stem = fold(trim(t.substr(0, t.size() - 1)));
    if (stem.empty()) throw InputError("wildcard pattern '" + p.label + "' has an empty stem");
    p.kind = MatchKind::prefix_wildcard;
    p.tokens = {stem};
    return p;
  }
  for (auto& tok : tokenize(t)) p.tokens.push_back(fold(tok));
  if (p.tokens.empty()) throw InputError("empty match pattern '" + p.label + "'");
  p.kind = p.tokens.size() == 1 ? MatchKind::literal : MatchKind::phrase;
  return p;
}

std::vector<MatchPattern> parse_patterns(const std::vector<std::string>& words) {
  std::vector<MatchPattern> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(MatchPattern::parse(w));
  return out;
}

const std::vector<std::string>& consensus_failure_cues() {
  static const std::vector<std::string> cues = {"conflicting", "contradictory", "inconsistent",
                                                "discrepant", "irreconcilable"};
  return cues;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> abbr = {"e.g.", "i.e.", "et al.", "Fig.", "Figs.",
                                                "vs.",  "cf.",  "etc.",   "Dr.",  "No.",
                                                "approx.", "resp.", "Eq."};
  return abbr;
}

std::vector<std::string> segment(std::string_view text, const std::vector<std::string>& abbreviations) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    const auto s = trim(text.substr(start, end - start));
    if (!s.empty()) out.emplace_back(s);
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    std::size_t gap = 0;
    while (j < text.size()) {
      const std::size_t n = whitespace_len(text, j);
      if (n == 0) break;
      j += n;
      gap += n;
    }
    if (gap == 0 || j >= text.size() || !std::isupper(static_cast<unsigned char>(text[j]))) continue;
    if (c == '.' && ends_with_abbreviation(text.substr(start, i + 1 - start), abbreviations)) continue;
    emit(i + 1);
    start = j;
    i = j - 1;
  }
  if (start < text.size()) emit(text.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t n = whitespace_len(text, i);
    if (n > 0) {
      i += n;
      continue;
    }
    const std::size_t b = i;
    while (i < text.size() && whitespace_len(text, i) == 0) ++i;
    std::string tok = strip_punct(text.substr(b, i - b));
    if (!tok.empty()) out.push_back(std::move(tok));
  }
  return out;
}

bool match(const MatchPattern& pattern, const std::vector<std::string>& folded_tokens) {
  for (std::size_t i = 0; i < folded_tokens.size(); ++i)
    if (matches_at(pattern, folded_tokens, i)) return true;
  return false;
}

std::size_t count_matches(const MatchPattern& pattern, const std::vector<std::string>& folded_tokens) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < folded_tokens.size(); ++i)
    if (matches_at(pattern, folded_tokens, i)) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Ingestion

std::size_t SentenceCorpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.sentences.size();
  return n;
}

std::size_t SentenceCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : documents)
    for (const auto& s : d.sentences) n += s.tokens.size();
  return n;
}

SentenceCorpus build_corpus(const std::vector<RawDocument>& docs) {
  std::unordered_set<std::string> ids;
  for (const auto& d : docs) {
    if (!ids.insert(d.doc_id).second) throw InputError("duplicate document id '" + d.doc_id + "'");
  }
  SentenceCorpus corpus;
  corpus.documents.resize(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& raw = docs[static_cast<std::size_t>(i)];
    Document doc;
    doc.doc_id = raw.doc_id;
    for (auto& text : segment(raw.text)) {
      Sentence s = make_sentence(std::move(text));
      if (!s.tokens.empty()) doc.sentences.push_back(std::move(s));
    }
    corpus.documents[static_cast<std::size_t>(i)] = std::move(doc);
  }
  return corpus;
}

std::vector<RawDocument> read_raw_documents(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<RawDocument> docs;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      docs.push_back({f.stem().string(), ss.str()});
    }
    return docs;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j["text"].is_string())
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected an object with \"id\" and \"text\"");
    const auto& id = j["id"];
    docs.push_back({id.is_string() ? id.get<std::string>() : id.dump(), j["text"].get<std::string>()});
  }
  return docs;
}

SentenceCorpus load_corpus(const std::filesystem::path& path) {
  return build_corpus(read_raw_documents(path));
}

DocumentCollection make_collection(std::string group_id, const std::vector<RawDocument>& docs) {
  DocumentCollection c;
  c.group_id = std::move(group_id);
  c.items.reserve(docs.size());
  for (const auto& d : docs) {
    CollectionItem item{d.doc_id, tokenize(d.text)};
    for (auto& t : item.tokens) t = fold(t);
    c.items.push_back(std::move(item));
  }
  return c;
}

std::vector<DocumentCollection> load_collections(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw InputError("cannot open collection manifest " + manifest.string());
  std::vector<DocumentCollection> out;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string_view::npos)
      throw InputError("manifest line without TAB separator: '" + std::string(t) + "'");
    std::string group(trim(t.substr(0, tab)));
    std::filesystem::path p(std::string(trim(t.substr(tab + 1))));
    if (p.is_relative()) p = manifest.parent_path() / p;
    if (!seen.insert(group).second) throw InputError("duplicate group id '" + group + "'");
    out.push_back(make_collection(group, read_raw_documents(p)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analytics

SplitResult split_corpus(const SentenceCorpus& corpus, const std::vector<MatchPattern>& indicators,
                         const SplitOptions& options) {
  if (indicators.empty()) throw InputError("split requires at least one indicator pattern");
  SplitResult r;
  r.indicators = indicators;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& toks = doc.sentences[s].tokens;
      const bool hit = std::any_of(indicators.begin(), indicators.end(),
                                   [&](const MatchPattern& p) { return match(p, toks); });
      (hit ? r.s_plus : r.s_minus).push_back({d, s});
    }
  }
  if (options.balance_seed) {
    auto& larger = r.s_plus.size() > r.s_minus.size() ? r.s_plus : r.s_minus;
    const std::size_t target = std::min(r.s_plus.size(), r.s_minus.size());
    std::mt19937_64 rng(*options.balance_seed);
    std::shuffle(larger.begin(), larger.end(), rng);
    larger.resize(target);
    std::sort(larger.begin(), larger.end());
  }
  return r;
}

RatioRow ratio_row(std::string word, std::size_t n_plus, std::size_t size_plus, std::size_t n_minus,
                   std::size_t size_minus) {
  if (size_plus == 0 || size_minus == 0)
    throw InputError("ratio table needs non-empty S+ and S- sets");
  RatioRow row;
  row.word = std::move(word);
  row.n_plus = n_plus;
  row.n_minus = n_minus;
  const double rp = static_cast<double>(n_plus) / static_cast<double>(size_plus);
  const double rm = static_cast<double>(n_minus) / static_cast<double>(size_minus);
  row.pct_plus = 100.0 * rp;
  row.pct_minus = 100.0 * rm;
  if (n_minus > 0)
    row.ratio = rp / rm;
  else
    row.ratio = n_plus > 0 ? std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::quiet_NaN();
  return row;
}

void sort_ratio_rows(std::vector<RatioRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const RatioRow& a, const RatioRow& b) {
    const bool an = std::isnan(a.ratio);
    const bool bn = std::isnan(b.ratio);
    if (an != bn) return bn;
    if (!an && a.ratio != b.ratio) return a.ratio > b.ratio;
    return a.word < b.word;
  });
}

std::vector<RatioRow> ratio_table(const std::vector<MatchPattern>& words, const SplitResult& split,
                                  const SentenceCorpus& corpus) {
  auto count = [&](const MatchPattern& p, const std::vector<SentenceRef>& refs) {
    std::size_t n = 0;
    for (const auto& ref : refs)
      if (match(p, corpus.documents[ref.doc].sentences[ref.sentence].tokens)) ++n;
    return n;
  };
  std::vector<RatioRow> rows;
  rows.reserve(words.size());
  for (const auto& w : words)
    rows.push_back(ratio_row(w.label, count(w, split.s_plus), split.s_plus.size(),
                             count(w, split.s_minus), split.s_minus.size()));
  sort_ratio_rows(rows);
  return rows;
}

std::vector<RelativeScore> relative_scores(const DocumentCollection& collection,
                                           const std::vector<MatchPattern>& words,
                                           const MatchPattern& baseline) {
  auto hits = [&](const MatchPattern& p) {
    std::size_t n = 0;
    for (const auto& item : collection.items)
      if (match(p, item.tokens)) ++n;
    return n;
  };
  const std::size_t base = hits(baseline);
  if (base == 0)
    throw InputError("baseline '" + baseline.label + "' has no document hits in group '" +
                     collection.group_id + "'");
  std::vector<RelativeScore> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    const std::size_t h = hits(w);
    out.push_back({w.label, h, static_cast<double>(h) / static_cast<double>(base)});
  }
  return out;
}

RateRow rate_row(std::string group, std::size_t matched, std::size_t total) {
  if (total == 0) throw InputError("group '" + group + "' has no items");
  return {std::move(group), matched, total,
          static_cast<double>(matched) / static_cast<double>(total)};
}

std::vector<RateRow> uncertainty_rate(const std::vector<DocumentCollection>& groups,
                                      const std::vector<MatchPattern>& query) {
  std::vector<RateRow> rows;
  rows.reserve(groups.size());
  for (const auto& g : groups) {
    std::size_t matched = 0;
    for (const auto& item : g.items) {
      if (std::any_of(query.begin(), query.end(),
                      [&](const MatchPattern& p) { return match(p, item.tokens); }))
        ++matched;
    }
    rows.push_back(rate_row(g.group_id, matched, g.items.size()));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const RateRow& a, const RateRow& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    return a.group < b.group;
  });
  return rows;
}

std::vector<SentenceMatch> find_sentences(const SentenceCorpus& corpus,
                                          const std::vector<MatchPattern>& cues, std::size_t limit) {
  std::vector<SentenceMatch> out;
  std::vector<std::size_t> used(cues.size(), 0);
  for (const auto& doc : corpus.documents) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& sent = doc.sentences[s];
      std::vector<std::size_t> hit;
      bool quota = false;
      for (std::size_t c = 0; c < cues.size(); ++c) {
        if (!match(cues[c], sent.tokens)) continue;
        hit.push_back(c);
        quota = quota || used[c] < limit;
      }
      if (!quota) continue;
      SentenceMatch m{doc.doc_id, s, sent.text, {}};
      for (std::size_t c : hit) {
        m.cues.push_back(cues[c].label);
        if (used[c] < limit) ++used[c];
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

}  // namespace cuelex
