#include "cuelex/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

namespace cuelex {

std::string_view to_string(SourceTag t) {
  switch (t) {
    case SourceTag::hedging: return "hedging";
    case SourceTag::scientific: return "scientific";
    case SourceTag::custom: break;
  }
  return "custom";
}

namespace {

SourceTag parse_tag(std::string_view text) {
  const std::string t = fold(trim(text));
  if (t.empty() || t == "custom") return SourceTag::custom;
  if (t == "hedging") return SourceTag::hedging;
  if (t == "scientific") return SourceTag::scientific;
  throw InputError("unknown source tag '" + std::string(text) + "'");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  while (true) {
    const auto e = s.find(sep, b);
    out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) break;
    b = e + 1;
  }
  return out;
}

std::string underscored(std::string_view s) {
  std::string out;
  bool gap = false;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      gap = true;
      continue;
    }
    if (gap && !out.empty()) out.push_back('_');
    gap = false;
    out.push_back(c);
  }
  return out;
}

std::size_t sentences_matching(const SentenceCorpus& corpus, const MatchPattern& p) {
  std::size_t n = 0;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences)
      if (match(p, s.tokens)) ++n;
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lexicon

void SeedLexicon::add(SeedEntry entry) {
  const std::string_view surface = trim(entry.surface);
  if (surface.empty()) throw InputError("seed lexicon entry with an empty surface");
  entry.surface = std::string(surface);
  entry.match_kind = entry.pattern().kind;
  if (entry.model_forms.empty()) {
    if (entry.match_kind == MatchKind::prefix_wildcard)
      throw InputError("wildcard seed '" + entry.surface + "' needs explicit model forms");
    entry.model_forms.push_back(entry.match_kind == MatchKind::phrase ? underscored(entry.surface)
                                                                      : entry.surface);
  }
  for (auto& f : entry.model_forms) {
    f = underscored(trim(f));
    if (f.empty() || f.find('*') != std::string::npos)
      throw InputError("seed '" + entry.surface + "' has an invalid model form");
  }
  const std::string key = fold(entry.surface);
  if (by_folded_.count(key)) throw InputError("duplicate seed '" + entry.surface + "'");
  by_folded_.emplace(key, entries_.size());
  excluded_.insert(key);
  for (const auto& f : entry.model_forms) excluded_.insert(fold(f));
  entries_.push_back(std::move(entry));
}

const SeedEntry* SeedLexicon::find(std::string_view folded) const {
  auto it = by_folded_.find(std::string(folded));
  return it == by_folded_.end() ? nullptr : &entries_[it->second];
}

SeedLexicon parse_lexicon(std::istream& in) {
  SeedLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    SeedEntry e;
    e.surface = std::string(trim(fields[0]));
    try {
      if (fields.size() > 1) e.source_tag = parse_tag(fields[1]);
      if (fields.size() > 2) {
        for (auto f : split(fields[2], ','))
          if (!trim(f).empty()) e.model_forms.emplace_back(trim(f));
      }
      lex.add(std::move(e));
    } catch (const InputError& err) {
      throw InputError("seed lexicon line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return lex;
}

SeedLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open seed lexicon " + path.string());
  try {
    return parse_lexicon(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Expansion

ExpansionResult expand(const EmbeddingModel& model, const SeedLexicon& lexicon, std::size_t k,
                       Exec exec) {
  struct Query {
    const SeedEntry* entry;
    std::string form;
    std::size_t index;
  };
  ExpansionResult result;
  std::vector<Query> queries;
  for (const auto& e : lexicon.entries()) {
    for (const auto& f : e.model_forms) {
      auto i = model.resolve(f, true);
      if (!i || !model.usable(*i)) {
        result.skipped.push_back({e.surface, f});
        continue;
      }
      queries.push_back({&e, f, *i});
    }
  }

  // Fan out over queries with serial scans, or scan in parallel per query;
  // either way results land in query order.
  std::vector<std::vector<NeighborResult>> hits(queries.size());
  const auto nq = static_cast<std::ptrdiff_t>(queries.size());
  if (exec == Exec::parallel && queries.size() > 1) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t q = 0; q < nq; ++q) {
      const auto u = static_cast<std::size_t>(q);
      hits[u] = top_k(model, model.token(queries[u].index), k, true, Exec::serial);
    }
  } else {
    for (std::size_t q = 0; q < queries.size(); ++q)
      hits[q] = top_k(model, model.token(queries[q].index), k, true, exec);
  }

  const auto& excluded = lexicon.excluded_words();
  std::map<std::pair<std::string, std::string>, CandidatePair> best;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const std::string seed = fold(queries[q].entry->surface);
    for (const auto& h : hits[q]) {
      std::string cand = fold(h.neighbor);
      if (excluded.count(cand)) continue;
      CandidatePair p{seed, cand, h.similarity, model.name(), h.query, h.neighbor};
      auto [it, fresh] = best.try_emplace({seed, cand}, p);
      if (!fresh && p.similarity > it->second.similarity) it->second = std::move(p);
    }
  }
  result.pairs.reserve(best.size());
  for (auto& [key, p] : best) result.pairs.push_back(std::move(p));
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const CandidatePair& a, const CandidatePair& b) {
              if (a.seed != b.seed) return a.seed < b.seed;
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.candidate < b.candidate;
            });
  return result;
}

std::set<std::string> distinct_candidates(const std::vector<CandidatePair>& pairs) {
  std::set<std::string> out;
  for (const auto& p : pairs) out.insert(p.candidate);
  return out;
}

std::vector<std::string> Candidate::contributing_seeds() const {
  std::set<std::string> s;
  for (const auto& [model, ev] : evidence) s.insert(ev.seeds.begin(), ev.seeds.end());
  return {s.begin(), s.end()};
}

const Candidate* CandidateSet::find(std::string_view word) const {
  auto it = std::lower_bound(candidates.begin(), candidates.end(), word,
                             [](const Candidate& c, std::string_view w) { return c.word < w; });
  return it != candidates.end() && it->word == word ? &*it : nullptr;
}

CandidateSet intersect(const std::set<std::string>& a, const std::set<std::string>& b,
                       const SeedLexicon& lexicon) {
  CandidateSet out;
  const auto& excluded = lexicon.excluded_words();
  for (const auto& w : a) {
    if (!b.count(w) || excluded.count(w)) continue;
    Candidate c;
    c.word = w;
    out.candidates.push_back(std::move(c));
  }
  return out;
}

CandidateSet intersect(const std::vector<CandidatePair>& a, const std::vector<CandidatePair>& b,
                       const SeedLexicon& lexicon) {
  CandidateSet out = intersect(distinct_candidates(a), distinct_candidates(b), lexicon);
  auto attach = [&](const std::vector<CandidatePair>& pairs) {
    for (const auto& p : pairs) {
      auto it = std::lower_bound(
          out.candidates.begin(), out.candidates.end(), p.candidate,
          [](const Candidate& c, const std::string& w) { return c.word < w; });
      if (it == out.candidates.end() || it->word != p.candidate) continue;
      auto [ev, fresh] = it->evidence.try_emplace(p.model_name, ModelEvidence{p.similarity, {}});
      if (!fresh) ev->second.best_similarity = std::max(ev->second.best_similarity, p.similarity);
      auto& seeds = ev->second.seeds;
      auto pos = std::lower_bound(seeds.begin(), seeds.end(), p.seed);
      if (pos == seeds.end() || *pos != p.seed) seeds.insert(pos, p.seed);
    }
  };
  attach(a);
  attach(b);
  return out;
}

// ---------------------------------------------------------------------------
// Scores

double pmi(const SentenceCorpus& corpus, const MatchPattern& x, const MatchPattern& y) {
  std::size_t n = 0, nx = 0, ny = 0, nxy = 0;
  for (const auto& d : corpus.documents) {
    for (const auto& s : d.sentences) {
      ++n;
      const bool hx = match(x, s.tokens);
      const bool hy = match(y, s.tokens);
      nx += hx;
      ny += hy;
      nxy += hx && hy;
    }
  }
  if (nx == 0) throw InsufficientEvidence("insufficient evidence: '" + x.label + "' never occurs");
  if (ny == 0) throw InsufficientEvidence("insufficient evidence: '" + y.label + "' never occurs");
  if (nxy == 0) return -std::numeric_limits<double>::infinity();
  const double p_y_given_x = static_cast<double>(nxy) / static_cast<double>(nx);
  const double p_y = static_cast<double>(ny) / static_cast<double>(n);
  return std::log(p_y_given_x / p_y);
}

double tfidf(const SentenceCorpus& corpus, const MatchPattern& word) {
  std::size_t cf = 0, total = 0, df = 0;
  for (const auto& d : corpus.documents) {
    std::size_t in_doc = 0;
    for (const auto& s : d.sentences) {
      in_doc += count_matches(word, s.tokens);
      total += s.tokens.size();
    }
    cf += in_doc;
    df += in_doc > 0;
  }
  if (df == 0) throw InsufficientEvidence("word absent: '" + word.label + "'");
  return (static_cast<double>(cf) / static_cast<double>(total)) *
         std::log(static_cast<double>(corpus.documents.size()) / static_cast<double>(df));
}

MatchPattern candidate_pattern(std::string_view word) {
  std::string w(word);
  std::replace(w.begin(), w.end(), '_', ' ');
  return MatchPattern::parse(w);
}

CandidateSet score_candidates(CandidateSet set, const SentenceCorpus& corpus,
                              const SeedLexicon& lexicon) {
  if (corpus.sentence_count() == 0) throw InputError("scoring corpus is empty");

  // Seed occurrence is shared by every candidate; skip starved seeds once.
  std::map<std::string, MatchPattern> seed_patterns;
  for (const auto& e : lexicon.entries()) {
    MatchPattern p = e.pattern();
    if (sentences_matching(corpus, p) > 0) seed_patterns.emplace(fold(e.surface), std::move(p));
  }

  const auto n = static_cast<std::ptrdiff_t>(set.candidates.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Candidate& c = set.candidates[static_cast<std::size_t>(i)];
    c.pmi.reset();
    c.tfidf.reset();
    const MatchPattern y = candidate_pattern(c.word);
    if (sentences_matching(corpus, y) == 0) {
      c.no_evidence = true;
      continue;
    }
    c.tfidf = tfidf(corpus, y);
    for (const auto& seed : c.contributing_seeds()) {
      auto it = seed_patterns.find(seed);
      if (it == seed_patterns.end()) continue;
      const double v = pmi(corpus, it->second, y);
      if (!c.pmi || v > *c.pmi) c.pmi = v;
    }
    c.no_evidence = !c.pmi.has_value();
  }
  return set;
}

// ---------------------------------------------------------------------------
// Pairs file

void write_pairs_tsv(std::ostream& out, const std::vector<CandidatePair>& pairs) {
  out << "seed\tcandidate\tsimilarity\tmodel\n";
  char buf[32];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%.6f", p.similarity);
    out << p.seed << '\t' << p.candidate << '\t' << buf << '\t' << p.model_name << '\n';
  }
}

std::vector<CandidatePair> read_pairs_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open pairs file " + path.string());
  std::vector<CandidatePair> out;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "seed\tcandidate\tsimilarity\tmodel")
        throw InputError(path.string() + ": unexpected pairs header '" + line + "'");
      header = true;
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() != 4 || f[0].empty() || f[1].empty())
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed pair row");
    CandidatePair p;
    p.seed = std::string(f[0]);
    p.candidate = std::string(f[1]);
    try {
      p.similarity = std::stod(std::string(f[2]));
    } catch (const std::exception&) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad similarity");
    }
    p.model_name = std::string(f[3]);
    out.push_back(std::move(p));
  }
  if (!header) throw InputError(path.string() + ": missing pairs header");
  return out;
}

}  // namespace cuelex
