#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cuelex/common.hpp"
#include "cuelex/expansion.hpp"
#include "oracles.hpp"

using namespace cuelex;

namespace {

SeedLexicon lexicon_of(const std::string& text) {
  std::istringstream in(text);
  return parse_lexicon(in);
}

SentenceCorpus corpus_of(std::vector<std::pair<std::string, std::string>> docs) {
  std::vector<RawDocument> raw;
  for (auto& [id, text] : docs) raw.push_back({id, text});
  return build_corpus(raw);
}

// Ten words around the unit circle; seeds sit at the centres of two
// planted neighbourhoods.
EmbeddingModel planted_model() {
  std::vector<std::string> vocab = {"doubt",   "unclear", "vague",   "murky",  "hazy",
                                    "certain", "sure",    "definite", "clear", "Unclear"};
  std::vector<float> v;
  const double angles[] = {0.0, 0.1, 0.2, 0.3, 0.4, 2.0, 2.1, 2.2, 2.3, 0.05};
  for (double a : angles) {
    v.push_back(static_cast<float>(std::cos(a)));
    v.push_back(static_cast<float>(std::sin(a)));
  }
  return EmbeddingModel("planted", 2, vocab, v);
}

}  // namespace

TEST_CASE("lexicon parsing") {
  const auto lex = lexicon_of(
      "# comment\n"
      "unknown\thedging\n"
      "surpris*\tscientific\tsurprising,surprise\n"
      "not sure\n"
      "\n");
  REQUIRE(lex.size() == 3);
  CHECK(lex.entries()[0].source_tag == SourceTag::hedging);
  CHECK(lex.entries()[1].match_kind == MatchKind::prefix_wildcard);
  CHECK(lex.entries()[1].model_forms == std::vector<std::string>{"surprising", "surprise"});
  CHECK(lex.entries()[2].match_kind == MatchKind::phrase);
  CHECK(lex.entries()[2].model_forms == std::vector<std::string>{"not_sure"});
  CHECK(lex.excluded_words().count("surprise"));
  CHECK(lex.excluded_words().count("not sure"));
  CHECK(lex.find("unknown") != nullptr);

  CHECK_THROWS_AS(lexicon_of("ambigu*\n"), InputError);
  CHECK_THROWS_AS(lexicon_of("Unknown\nunknown\n"), InputError);
  CHECK_THROWS_AS(lexicon_of("x\tnonsense\n"), InputError);
  CHECK_THROWS_AS(load_lexicon("/nonexistent/seeds.txt"), InputError);
}

TEST_CASE("expand on an empty lexicon is empty") {
  const auto m = planted_model();
  const auto r = expand(m, SeedLexicon{}, 5);
  CHECK(r.pairs.empty());
  CHECK(r.skipped.empty());
}

TEST_CASE("expand matches brute force minus seed hits") {
  const auto m = planted_model();
  const auto lex = lexicon_of("doubt\ncertain\nmissing\n");
  const std::size_t k = 4;
  const auto r = expand(m, lex, k);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].surface == "missing");

  // Oracle: rank by cosine over the same vectors, fold, drop seeds.
  oracle::RawModel raw;
  raw.dim = 2;
  raw.tokens = m.vocab();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (float x : m.vector(i)) raw.values.push_back(x);
  std::vector<std::pair<std::string, std::string>> expected;
  for (std::string seed : {"certain", "doubt"}) {
    const auto qi = *m.find(seed);
    for (const auto& h : oracle::brute_top_k(raw, qi, k, true)) {
      const auto c = oracle::lower(h.token);
      if (c == "doubt" || c == "certain" || c == "missing") continue;
      expected.emplace_back(seed, c);
    }
  }
  REQUIRE(r.pairs.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(r.pairs[i].seed == expected[i].first);
    CHECK(r.pairs[i].candidate == expected[i].second);
  }
  CHECK(r.pairs.size() <= 2 * k);
  for (const auto& p : r.pairs) {
    CHECK(p.model_name == "planted");
    CHECK(std::abs(p.similarity - cosine(m, p.query_form, p.neighbor_token)) < 1e-6);
  }
}

TEST_CASE("expand output is deterministic and ordered") {
  std::mt19937_64 rng(42);
  const auto raw = oracle::random_model(rng, 300, 16);
  EmbeddingModel m("r", raw.dim, raw.tokens, raw.values);
  std::string text;
  for (int i = 0; i < 12; ++i) text += raw.tokens[static_cast<std::size_t>(i * 7)] + "\n";
  const auto lex = lexicon_of(text);
  const auto a = expand(m, lex, 20, Exec::parallel);
  const auto b = expand(m, lex, 20, Exec::serial);
  std::ostringstream sa, sb;
  write_pairs_tsv(sa, a.pairs);
  write_pairs_tsv(sb, b.pairs);
  CHECK(sa.str() == sb.str());
  CHECK(a.pairs.size() <= lex.size() * 20);
  CHECK(std::is_sorted(a.pairs.begin(), a.pairs.end(), [](const auto& x, const auto& y) {
    if (x.seed != y.seed) return x.seed < y.seed;
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    return x.candidate < y.candidate;
  }));
  for (const auto& p : a.pairs) CHECK_FALSE(lex.excluded_words().count(p.candidate));
}

TEST_CASE("distinct candidates") {
  std::vector<CandidatePair> pairs = {{"s1", "a", 0.5, "m", "", ""},
                                      {"s2", "a", 0.4, "m", "", ""},
                                      {"s1", "b", 0.3, "m", "", ""}};
  CHECK(distinct_candidates(pairs) == std::set<std::string>{"a", "b"});

  std::mt19937_64 rng(6);
  std::vector<CandidatePair> many;
  std::vector<std::string> words;
  for (int i = 0; i < 500; ++i) {
    std::string w = "w" + std::to_string(rng() % 120);
    many.push_back({"s", w, 0.1, "m", "", ""});
    words.push_back(w);
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  CHECK(distinct_candidates(many).size() == words.size());
  CHECK(distinct_candidates(many).size() <= many.size());
}

TEST_CASE("intersect") {
  const auto lex = lexicon_of("s\n");
  CHECK(intersect({"a"}, {"b"}, lex).candidates.empty());
  const auto r = intersect({"x", "y", "s"}, {"y", "z", "s"}, lex);
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].word == "y");
  CHECK(r.candidates[0].status == Status::unrated);

  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    std::set<std::string> a, b;
    for (int i = 0; i < 40; ++i) {
      a.insert("w" + std::to_string(rng() % 60));
      b.insert("w" + std::to_string(rng() % 60));
    }
    a.insert("s");
    const auto ab = intersect(a, b, lex);
    const auto ba = intersect(b, a, lex);
    REQUIRE(ab.candidates.size() == ba.candidates.size());
    for (std::size_t i = 0; i < ab.candidates.size(); ++i) {
      CHECK(ab.candidates[i].word == ba.candidates[i].word);
      CHECK(a.count(ab.candidates[i].word));
      CHECK(b.count(ab.candidates[i].word));
    }
    CHECK(ab.find("s") == nullptr);
  }
}

TEST_CASE("intersect with provenance") {
  const auto lex = lexicon_of("doubt\nfear\n");
  std::vector<CandidatePair> a = {{"doubt", "vague", 0.9, "g", "doubt", "vague"},
                                  {"fear", "vague", 0.95, "g", "fear", "Vague"},
                                  {"doubt", "only_a", 0.5, "g", "doubt", "only_a"}};
  std::vector<CandidatePair> b = {{"doubt", "vague", 0.7, "p", "doubt", "vague"},
                                  {"doubt", "only_b", 0.6, "p", "doubt", "only_b"}};
  const auto r = intersect(a, b, lex);
  REQUIRE(r.candidates.size() == 1);
  const auto& c = r.candidates[0];
  CHECK(c.word == "vague");
  REQUIRE(c.evidence.size() == 2);
  CHECK(c.evidence.at("g").best_similarity == 0.95);
  CHECK(c.evidence.at("g").seeds == std::vector<std::string>{"doubt", "fear"});
  CHECK(c.evidence.at("p").seeds == std::vector<std::string>{"doubt"});
  CHECK(c.contributing_seeds() == std::vector<std::string>{"doubt", "fear"});
}

TEST_CASE("pmi") {
  const auto c = corpus_of({{"d", "X y here. X y again. X alone. Y alone."}});
  const auto x = MatchPattern::parse("x");
  const auto y = MatchPattern::parse("y");
  CHECK(pmi(c, x, y) == doctest::Approx(std::log(8.0 / 9.0)).epsilon(1e-12));
  CHECK(std::abs(pmi(c, x, y) - -0.1178) < 1e-4);

  const auto every = corpus_of({{"d", "The b. The c. The b c."}, {"e", "C the."}});
  CHECK(pmi(every, MatchPattern::parse("b"), MatchPattern::parse("the")) == 0.0);

  const auto apart = corpus_of({{"d", "X one. Y two."}});
  CHECK(std::isinf(pmi(apart, x, y)));
  CHECK(pmi(apart, x, y) < 0);
  CHECK_THROWS_AS(pmi(apart, MatchPattern::parse("z"), y), InsufficientEvidence);
  CHECK_THROWS_AS(pmi(apart, x, MatchPattern::parse("z")), InsufficientEvidence);
}

TEST_CASE("pmi tends to zero for independent words") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RawDocument> docs;
  for (int i = 0; i < 10000; ++i) {
    std::string s = "Filler";
    if (u(rng) < 0.3) s += " xx";
    if (u(rng) < 0.4) s += " yy";
    docs.push_back({std::to_string(i), s + "."});
  }
  const auto c = build_corpus(docs);
  CHECK(std::abs(pmi(c, MatchPattern::parse("xx"), MatchPattern::parse("yy"))) < 0.05);
}

TEST_CASE("tfidf") {
  const auto c = corpus_of({{"1", "w a b c d e f g h w"}, {"2", "a b c d e f g h i j"}});
  CHECK(tfidf(c, MatchPattern::parse("w")) == doctest::Approx(0.1 * std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(tfidf(c, MatchPattern::parse("w")) - 0.0693) < 1e-4);
  CHECK(tfidf(c, MatchPattern::parse("a")) == 0.0);
  CHECK_THROWS_AS(tfidf(c, MatchPattern::parse("zz")), InsufficientEvidence);
  const auto r = corpus_of({{"2", "a b c d e f g h i j"}, {"1", "w a b c d e f g h w"}});
  CHECK(tfidf(r, MatchPattern::parse("w")) == tfidf(c, MatchPattern::parse("w")));
}

TEST_CASE("candidate patterns") {
  CHECK(candidate_pattern("not_sure").kind == MatchKind::phrase);
  CHECK(candidate_pattern("vague").kind == MatchKind::literal);
}

TEST_CASE("score_candidates matches per-pair recomputation") {
  const auto lex = lexicon_of("doubt\nfear\n");
  const auto corpus = corpus_of({{"1", "Doubt is vague. Fear is vague too. Murky fear."},
                                 {"2", "Doubt and murky water. Nothing here."},
                                 {"3", "Plain sentence only."}});
  std::vector<CandidatePair> a = {{"doubt", "vague", 0.9, "g", "", ""},
                                  {"fear", "vague", 0.8, "g", "", ""},
                                  {"doubt", "murky", 0.7, "g", "", ""},
                                  {"fear", "absent", 0.6, "g", "", ""}};
  auto b = a;
  for (auto& p : b) p.model_name = "p";
  const auto scored = score_candidates(intersect(a, b, lex), corpus, lex);
  REQUIRE(scored.candidates.size() == 3);

  const auto* absent = scored.find("absent");
  REQUIRE(absent != nullptr);
  CHECK(absent->no_evidence);
  CHECK_FALSE(absent->tfidf.has_value());

  const auto* vague = scored.find("vague");
  REQUIRE(vague != nullptr);
  const double expect_vague = std::max(pmi(corpus, MatchPattern::parse("doubt"), MatchPattern::parse("vague")),
                                       pmi(corpus, MatchPattern::parse("fear"), MatchPattern::parse("vague")));
  CHECK(*vague->pmi == expect_vague);
  CHECK(*vague->tfidf == tfidf(corpus, MatchPattern::parse("vague")));

  const auto* murky = scored.find("murky");
  REQUIRE(murky != nullptr);
  CHECK(*murky->pmi == pmi(corpus, MatchPattern::parse("doubt"), MatchPattern::parse("murky")));
}

TEST_CASE("pairs file round trip") {
  std::vector<CandidatePair> pairs = {{"doubt", "vague", 0.123456789, "g", "doubt", "vague"},
                                      {"doubt", "murky", -0.5, "g", "doubt", "Murky"}};
  const auto p = std::filesystem::temp_directory_path() / "cuelex_pairs.tsv";
  {
    std::ofstream out(p);
    write_pairs_tsv(out, pairs);
  }
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "seed\tcandidate\tsimilarity\tmodel");
  std::string first;
  std::getline(in, first);
  CHECK(first == "doubt\tvague\t0.123457\tg");
  const auto back = read_pairs_tsv(p);
  REQUIRE(back.size() == 2);
  CHECK(back[1].candidate == "murky");
  CHECK(back[1].similarity == -0.5);
}
