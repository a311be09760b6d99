#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "cuelex/classify.hpp"
#include "cuelex/common.hpp"
#include "cuelex/corpus.hpp"
#include "cuelex/cue_graph.hpp"
#include "cuelex/reduce.hpp"

namespace cuelex::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) throw InputError(std::string(command) + ": " + flag + " is required");
}

SeedLexicon lexicon_for(const RunConfig& cfg, const char* command) {
  require(cfg.seeds, "--seeds", command);
  auto lex = load_lexicon(cfg.seeds);
  if (lex.empty()) throw InputError("seed lexicon " + cfg.seeds + " has no entries");
  return lex;
}

std::vector<MatchPattern> patterns_or(const std::vector<std::string>& given,
                                      const std::vector<std::string>& fallback) {
  const auto words = expand_list(given);
  return parse_patterns(words.empty() ? fallback : words);
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_');
  return out;
}

json pattern_labels(const std::vector<MatchPattern>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(p.label);
  return a;
}

json ratio_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return "inf";
  return v;
}

void write_pairs_json(Outputs& out, const std::string& name, const EmbeddingModel& m,
                      const ExpansionResult& r, std::size_t k) {
  json pairs = json::array();
  for (const auto& p : r.pairs) pairs.push_back(pair_json(p));
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"seed", s.surface}, {"form", s.form}});
  out.json(name, {{"model", m.name()},
                  {"dim", m.dim()},
                  {"vocab_size", m.size()},
                  {"k", k},
                  {"pair_count", r.pairs.size()},
                  {"distinct_candidates", distinct_candidates(r.pairs).size()},
                  {"pairs", pairs},
                  {"skipped", skipped}});
}

ExpansionResult expand_one(Outputs& out, const EmbeddingModel& m, const SeedLexicon& lex,
                           std::size_t k) {
  auto r = expand(m, lex, k);
  const std::string stem = "pairs_" + sanitize(m.name());
  out.text(stem + ".tsv", [&](std::ostream& s) { write_pairs_tsv(s, r.pairs); });
  write_pairs_json(out, stem + ".json", m, r, k);
  std::cout << m.name() << ": " << r.pairs.size() << " pairs, "
            << distinct_candidates(r.pairs).size() << " distinct candidates, " << r.skipped.size()
            << " seed form(s) not in vocabulary\n";
  return r;
}

void emit_candidates(Outputs& out, const std::string& stem, const CandidateSet& set) {
  out.json(stem + ".json", candidates_json(set));
  out.text(stem + ".tsv", [&](std::ostream& s) { write_candidates_tsv(s, set); });
}

CandidateSet read_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open candidate file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return candidates_from_json(j);
}

std::map<std::string, Status> statuses_from(const std::vector<Annotation>& ann) {
  std::map<std::string, Status> st;
  for (const auto& a : ann) {
    Status s = Status::unrated;
    if (a.judge1 == Label::pos && a.judge2 == Label::pos) s = Status::accepted;
    else if (a.judge1 == Label::neg && a.judge2 == Label::neg) s = Status::rejected;
    st[fold(a.word)] = s;
  }
  return st;
}

LoadedGraph read_graph(const RunConfig& cfg, Outputs& out, const char* command) {
  require(cfg.nodes, "--nodes", command);
  require(cfg.edges, "--edges", command);
  out.add_input(cfg.nodes);
  out.add_input(cfg.edges);
  return read_graph_tsv(cfg.nodes, cfg.edges);
}

void write_graph_files(Outputs& out, const std::string& nodes_name, const LoadedGraph& g) {
  const Partition* part = g.partition ? &*g.partition : nullptr;
  const PageRankVector* ranks = g.ranks ? &*g.ranks : nullptr;
  out.text(nodes_name, [&](std::ostream& s) { write_node_tsv(s, g.graph, part, ranks); });
}

SentenceCorpus corpus_for(const RunConfig& cfg, Outputs& out, const char* command) {
  require(cfg.corpus, "--corpus", command);
  out.add_input(cfg.corpus);
  return load_corpus(cfg.corpus);
}

}  // namespace

// ---------------------------------------------------------------------------
// expansion

int cmd_expand(const RunConfig& cfg) {
  Outputs out(cfg, "expand");
  const auto lex = lexicon_for(cfg, "expand");
  out.add_input(cfg.seeds);
  for (const auto& spec : model_specs(cfg)) out.add_input(spec.path.string());
  for (const auto& m : load_models(cfg, &lex)) expand_one(out, m, lex, cfg.k);
  return 0;
}

int cmd_intersect(const RunConfig& cfg) {
  Outputs out(cfg, "intersect");
  if (cfg.pairs.size() != 2) throw InputError("intersect: give exactly two --pairs files");
  const auto lex = lexicon_for(cfg, "intersect");
  std::vector<std::vector<CandidatePair>> lists;
  std::set<std::string> names;
  for (const auto& p : cfg.pairs) {
    out.add_input(p);
    lists.push_back(read_pairs_tsv(p));
    for (const auto& pair : lists.back()) names.insert(pair.model_name);
  }
  if (names.size() < 2) throw InputError("intersect: the pair files must come from two different models");
  const auto set = intersect(lists[0], lists[1], lex);
  emit_candidates(out, "candidates", set);
  std::cout << "candidates: " << set.candidates.size() << "\n";
  return 0;
}

int cmd_score(const RunConfig& cfg) {
  Outputs out(cfg, "score");
  require(cfg.candidates, "--candidates", "score");
  out.add_input(cfg.candidates);
  const auto lex = lexicon_for(cfg, "score");
  const auto corpus = corpus_for(cfg, out, "score");
  const auto scored = score_candidates(read_candidates(cfg.candidates), corpus, lex);
  emit_candidates(out, "candidates_scored", scored);
  std::size_t missing = 0;
  for (const auto& c : scored.candidates) missing += c.no_evidence;
  std::cout << "scored " << scored.candidates.size() << " candidates, " << missing
            << " without corpus evidence\n";
  return 0;
}

int cmd_pipeline(const RunConfig& cfg) {
  Outputs out(cfg, "pipeline");
  const auto lex = lexicon_for(cfg, "pipeline");
  out.add_input(cfg.seeds);
  if (model_specs(cfg).size() != 2) throw InputError("pipeline: give exactly two --model values");
  const auto models = load_models(cfg, &lex);
  const auto a = expand_one(out, models[0], lex, cfg.k);
  const auto b = expand_one(out, models[1], lex, cfg.k);
  CandidateSet set = intersect(a.pairs, b.pairs, lex);
  if (!cfg.corpus.empty()) set = score_candidates(std::move(set), corpus_for(cfg, out, "pipeline"), lex);
  emit_candidates(out, "candidates", set);
  out.text("review.csv", [&](std::ostream& s) { write_review_csv(s, set); });
  std::cout << "candidates: " << set.candidates.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// corpus analytics

int cmd_split(const RunConfig& cfg) {
  Outputs out(cfg, "split");
  const auto corpus = corpus_for(cfg, out, "split");
  const auto ind = patterns_or(cfg.indicators, consensus_failure_cues());
  SplitOptions opt;
  if (cfg.balance) opt.balance_seed = cfg.rng_seed;
  const auto s = split_corpus(corpus, ind, opt);
  out.text("split.tsv", [&](std::ostream& o) {
    o << "doc_id\tsentence\tset\n";
    std::vector<std::pair<SentenceRef, char>> rows;
    for (const auto& r : s.s_plus) rows.emplace_back(r, '+');
    for (const auto& r : s.s_minus) rows.emplace_back(r, '-');
    std::sort(rows.begin(), rows.end());
    for (const auto& [r, side] : rows)
      o << corpus.documents[r.doc].doc_id << '\t' << r.sentence << '\t' << (side == '+' ? "S+" : "S-")
        << '\n';
  });
  out.json("split.json", {{"indicators", pattern_labels(ind)},
                          {"sentences", corpus.sentence_count()},
                          {"s_plus", s.s_plus.size()},
                          {"s_minus", s.s_minus.size()},
                          {"balanced", cfg.balance}});
  std::cout << "S+ " << s.s_plus.size() << "  S- " << s.s_minus.size() << "\n";
  return 0;
}

int cmd_ratios(const RunConfig& cfg) {
  Outputs out(cfg, "ratios");
  const auto corpus = corpus_for(cfg, out, "ratios");
  const auto ind = patterns_or(cfg.indicators, consensus_failure_cues());
  const auto words = expand_list(cfg.words);
  if (words.empty()) throw InputError("ratios: --words is required");
  SplitOptions opt;
  if (cfg.balance) opt.balance_seed = cfg.rng_seed;
  const auto s = split_corpus(corpus, ind, opt);
  const auto rows = ratio_table(parse_patterns(words), s, corpus);
  out.text("ratios.tsv", [&](std::ostream& o) {
    o << "word\tn_plus\tpct_plus\tn_minus\tpct_minus\tratio\n";
    for (const auto& r : rows)
      o << r.word << '\t' << r.n_plus << '\t' << fixed(r.pct_plus, 3) << '\t' << r.n_minus << '\t'
        << fixed(r.pct_minus, 3) << '\t' << fixed(r.ratio, 3) << '\n';
  });
  json list = json::array();
  for (const auto& r : rows)
    list.push_back({{"word", r.word},
                    {"n_plus", r.n_plus},
                    {"pct_plus", r.pct_plus},
                    {"n_minus", r.n_minus},
                    {"pct_minus", r.pct_minus},
                    {"ratio", ratio_json(r.ratio)}});
  out.json("ratios.json", {{"s_plus", s.s_plus.size()}, {"s_minus", s.s_minus.size()}, {"rows", list}});
  for (const auto& r : rows) std::cout << r.word << '\t' << fixed(r.ratio, 3) << '\n';
  return 0;
}

int cmd_relscore(const RunConfig& cfg) {
  Outputs out(cfg, "relscore");
  require(cfg.collections, "--collections", "relscore");
  out.add_input(cfg.collections);
  const auto words = expand_list(cfg.words);
  if (words.empty()) throw InputError("relscore: --words is required");
  const auto groups = load_collections(cfg.collections);
  const auto pats = parse_patterns(words);
  const auto base = MatchPattern::parse(cfg.baseline);

  ScoreMatrix m;
  m.row_labels = words;
  m.values.resize(static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(groups.size()));
  json per_group = json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    m.col_labels.push_back(groups[g].group_id);
    std::vector<RelativeScore> scores;
    try {
      scores = relative_scores(groups[g], pats, base);
    } catch (const InputError& e) {
      throw InputError("group '" + groups[g].group_id + "': " + e.what());
    }
    json rows = json::array();
    for (std::size_t w = 0; w < scores.size(); ++w) {
      m.values(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(g)) = scores[w].score;
      rows.push_back({{"word", scores[w].word}, {"hits", scores[w].hits}, {"score", scores[w].score}});
    }
    per_group.push_back({{"group", groups[g].group_id}, {"items", groups[g].items.size()}, {"scores", rows}});
  }
  out.text("relscore.tsv", [&](std::ostream& o) { write_score_matrix(o, m); });
  out.json("relscore.json", {{"baseline", cfg.baseline}, {"groups", per_group}});
  std::cout << "scored " << words.size() << " word(s) over " << groups.size() << " group(s)\n";
  return 0;
}

int cmd_rates(const RunConfig& cfg) {
  Outputs out(cfg, "rates");
  require(cfg.collections, "--collections", "rates");
  out.add_input(cfg.collections);
  const auto groups = load_collections(cfg.collections);
  const auto query = patterns_or(cfg.words, consensus_failure_cues());
  const auto rows = uncertainty_rate(groups, query);
  out.text("rates.tsv", [&](std::ostream& o) {
    o << "group\tmatched\ttotal\trate\tpct\n";
    for (const auto& r : rows)
      o << r.group << '\t' << r.matched << '\t' << r.total << '\t' << fixed(r.rate, 6) << '\t'
        << fixed(100.0 * r.rate, 0) << '\n';
  });
  json list = json::array();
  for (const auto& r : rows)
    list.push_back({{"group", r.group}, {"matched", r.matched}, {"total", r.total}, {"rate", r.rate}});
  out.json("rates.json", {{"query", pattern_labels(query)}, {"rows", list}});
  for (const auto& r : rows) std::cout << r.group << '\t' << fixed(100.0 * r.rate, 1) << "%\n";
  return 0;
}

int cmd_find(const RunConfig& cfg) {
  Outputs out(cfg, "find");
  const auto corpus = corpus_for(cfg, out, "find");
  const auto words = expand_list(cfg.words);
  if (words.empty()) throw InputError("find: --words is required");
  if (cfg.limit == 0) throw InputError("find: --limit must be positive");
  const auto rows = find_sentences(corpus, parse_patterns(words), cfg.limit);
  auto joined = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + v[i];
    return s;
  };
  out.text("sentences.tsv", [&](std::ostream& o) {
    o << "doc_id\tsentence_index\tcues\tsentence\n";
    for (const auto& r : rows)
      o << r.doc_id << '\t' << r.sentence_index << '\t' << joined(r.cues) << '\t' << one_line(r.sentence)
        << '\n';
  });
  json list = json::array();
  for (const auto& r : rows)
    list.push_back({{"doc_id", r.doc_id}, {"sentence_index", r.sentence_index}, {"cues", r.cues},
                    {"sentence", r.sentence}});
  out.json("sentences.json", {{"limit", cfg.limit}, {"rows", list}});
  std::cout << rows.size() << " sentence(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// graph

int cmd_graph(const RunConfig& cfg) {
  Outputs out(cfg, "graph");
  if (cfg.pairs.empty()) throw InputError("graph: --pairs is required");
  const auto lex = lexicon_for(cfg, "graph");
  std::vector<CandidatePair> pairs;
  for (const auto& p : cfg.pairs) {
    out.add_input(p);
    auto more = read_pairs_tsv(p);
    pairs.insert(pairs.end(), more.begin(), more.end());
  }
  std::map<std::string, Status> statuses;
  if (!cfg.annotations.empty()) {
    out.add_input(cfg.annotations);
    statuses = statuses_from(read_annotations(cfg.annotations));
  }
  LoadedGraph g{build_graph(pairs, lex, statuses), std::nullopt, std::nullopt};
  if (cfg.augment_threshold > 0.0) {
    const auto models = load_models(cfg, &lex);
    augment_by_threshold(g.graph, models.front(), cfg.augment_threshold);
  }
  write_graph_files(out, "nodes.tsv", g);
  out.text("edges.tsv", [&](std::ostream& s) { write_edge_tsv(s, g.graph); });
  out.xml("graph.gexf", [&](std::ostream& s) { write_gexf(s, g.graph, nullptr, nullptr); });
  std::cout << g.graph.node_count() << " nodes, " << g.graph.edge_count() << " edges\n";
  return 0;
}

int cmd_cluster(const RunConfig& cfg) {
  Outputs out(cfg, "cluster");
  auto g = read_graph(cfg, out, "cluster");
  const auto traced = louvain_traced(g.graph, cfg.resolution, cfg.rng_seed);
  g.partition = traced.partition;
  const auto rows = composition(g.graph, traced.partition);
  const double q = modularity(g.graph, traced.partition);
  write_graph_files(out, "nodes_clustered.tsv", g);
  out.text("composition.tsv", [&](std::ostream& o) {
    o << "community\tsize\tn_seed\tn_accepted\tn_rejected\tn_unrated\n";
    for (const auto& r : rows)
      o << r.community << '\t' << r.size() << '\t' << r.n_seed << '\t' << r.n_accepted << '\t'
        << r.n_rejected << '\t' << r.n_unrated << '\n';
  });
  json list = json::array();
  for (const auto& r : rows)
    list.push_back({{"community", r.community}, {"size", r.size()}, {"n_seed", r.n_seed},
                    {"n_accepted", r.n_accepted}, {"n_rejected", r.n_rejected}, {"n_unrated", r.n_unrated}});
  out.json("composition.json", {{"resolution", cfg.resolution},
                                {"modularity", q},
                                {"pass_modularity", traced.pass_modularity},
                                {"communities", list}});
  std::cout << rows.size() << " communities, modularity " << fixed(q, 4) << "\n";
  return 0;
}

int cmd_rank(const RunConfig& cfg) {
  Outputs out(cfg, "rank");
  auto g = read_graph(cfg, out, "rank");
  g.ranks = pagerank(g.graph, cfg.damping, cfg.tol, cfg.max_iter);
  write_graph_files(out, "nodes_ranked.tsv", g);
  std::vector<std::size_t> order(g.graph.node_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& r = *g.ranks;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (r[a] != r[b]) return r[a] > r[b];
    return g.graph.node(a).word < g.graph.node(b).word;
  });
  out.text("ranks.tsv", [&](std::ostream& o) {
    o << "rank\tword\tlabel\tpagerank\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& n = g.graph.node(order[i]);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", r[order[i]]);
      o << i + 1 << '\t' << n.word << '\t' << format_label(n.word, n.is_seed, n.status) << '\t' << buf << '\n';
    }
  });
  for (std::size_t i = 0; i < std::min<std::size_t>(order.size(), 10); ++i)
    std::cout << g.graph.node(order[i]).word << '\t' << fixed(r[order[i]], 6) << '\n';
  return 0;
}

int cmd_export(const RunConfig& cfg) {
  Outputs out(cfg, "export");
  const auto g = read_graph(cfg, out, "export");
  const Partition* part = g.partition ? &*g.partition : nullptr;
  const PageRankVector* ranks = g.ranks ? &*g.ranks : nullptr;
  const std::string f = fold(cfg.format);
  if (f == "gexf") out.xml("graph.gexf", [&](std::ostream& s) { write_gexf(s, g.graph, part, ranks); });
  else if (f == "node_tsv") out.text("export_nodes.tsv", [&](std::ostream& s) { write_node_tsv(s, g.graph, part, ranks); });
  else if (f == "edge_tsv") out.text("export_edges.tsv", [&](std::ostream& s) { write_edge_tsv(s, g.graph); });
  else throw InputError("export: --format must be gexf, node_tsv or edge_tsv");
  std::cout << "wrote " << out.written().back().string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// classification

int cmd_agree(const RunConfig& cfg) {
  Outputs out(cfg, "agree");
  require(cfg.annotations, "--annotations", "agree");
  out.add_input(cfg.annotations);
  const auto r = agreement(read_annotations(cfg.annotations));
  out.text("agreement.tsv", [&](std::ostream& o) {
    o << "pp\tpn\tnp\tnn\tpercent_agreement\texpected_agreement\tkappa\tband\n"
      << r.counts.pp << '\t' << r.counts.pn << '\t' << r.counts.np << '\t' << r.counts.nn << '\t'
      << fixed(r.percent_agreement, 6) << '\t' << fixed(r.expected_agreement, 6) << '\t'
      << fixed(r.kappa, 6) << '\t' << r.band << '\n';
  });
  out.json("agreement.json", {{"pp", r.counts.pp},
                              {"pn", r.counts.pn},
                              {"np", r.counts.np},
                              {"nn", r.counts.nn},
                              {"percent_agreement", r.percent_agreement},
                              {"expected_agreement", r.expected_agreement},
                              {"kappa", r.kappa},
                              {"band", r.band}});
  std::cout << "items " << r.counts.total() << "\n"
            << "pp " << r.counts.pp << " pn " << r.counts.pn << " np " << r.counts.np << " nn "
            << r.counts.nn << "\n"
            << "percent " << fixed(r.percent_agreement, 3) << "\n"
            << "kappa " << fixed(r.kappa, 4) << "\n"
            << "band " << r.band << "\n";
  return 0;
}

int cmd_dataset(const RunConfig& cfg) {
  Outputs out(cfg, "dataset");
  require(cfg.annotations, "--annotations", "dataset");
  out.add_input(cfg.annotations);
  const auto ann = read_annotations(cfg.annotations);
  std::vector<std::string> accepted, rejected;
  std::set<std::string> judged;
  for (const auto& a : ann) {
    judged.insert(fold(a.word));
    if (a.judge1 == Label::pos && a.judge2 == Label::pos) accepted.push_back(a.word);
    else if (a.judge1 == Label::neg && a.judge2 == Label::neg) rejected.push_back(a.word);
  }
  std::optional<SeedLexicon> lex;
  if (!cfg.seeds.empty()) lex = lexicon_for(cfg, "dataset");
  if (cfg.unrelated > 0 && !lex) throw InputError("dataset: --seeds is required to sample unrelated words");

  const auto models = load_models(cfg, lex ? &*lex : nullptr, judged);
  std::vector<const EmbeddingModel*> ptrs;
  for (const auto& m : models) ptrs.push_back(&m);

  std::vector<std::string> unrelated;
  if (cfg.unrelated > 0)
    unrelated = sample_unrelated(models.front(), *lex, cfg.unrelated, cfg.max_sim, cfg.rng_seed, judged);
  std::vector<std::string> seed_words;
  if (cfg.include_seeds) {
    if (!lex) throw InputError("dataset: --include-seeds needs --seeds");
    std::set<std::string> acc_keys;
    for (const auto& w : accepted) acc_keys.insert(fold(w));
    for (const auto& e : lex->entries())
      for (const auto& f : e.model_forms)
        if (!acc_keys.count(fold(f))) seed_words.push_back(f);
  }
  const auto ds = build_dataset(accepted, rejected, unrelated, ptrs, cfg.include_seeds ? &seed_words : nullptr);
  out.text("dataset.tsv", [&](std::ostream& s) { write_dataset_tsv(s, ds); });
  out.text("unrelated.txt", [&](std::ostream& s) {
    for (const auto& w : unrelated) s << w << '\n';
  });
  out.json("dataset.json", {{"examples", ds.examples.size()},
                            {"positives", ds.positives()},
                            {"negatives", ds.negatives()},
                            {"accepted", accepted.size()},
                            {"rejected", rejected.size()},
                            {"unrelated", unrelated.size()},
                            {"seeds_included", seed_words.size()},
                            {"feature_dim", ds.feature_dim},
                            {"excluded", ds.excluded}});
  std::cout << ds.examples.size() << " examples (" << ds.positives() << " positive, " << ds.negatives()
            << " negative)\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  Outputs out(cfg, "train");
  require(cfg.dataset, "--dataset", "train");
  out.add_input(cfg.dataset);
  const auto ds = read_dataset_tsv(cfg.dataset);
  const auto folds = kfold(ds, cfg.folds, cfg.rng_seed);
  std::vector<EvalReport> reports;
  for (const auto& text : cfg.classifiers) {
    auto spec = ClassifierSpec::parse(text);
    if (text.find("seed=") == std::string::npos) spec.rng_seed = cfg.rng_seed;
    reports.push_back(train_eval(ds, spec, folds));
  }
  out.text("eval.tsv", [&](std::ostream& o) {
    o << "classifier\taccuracy\tprecision\trecall\tf1\ttp\tfp\tfn\ttn\tfolds\tfold_digest\n";
    for (const auto& r : reports)
      o << r.classifier << '\t' << fixed(r.metrics.accuracy, 6) << '\t' << fixed(r.metrics.precision, 6)
        << '\t' << fixed(r.metrics.recall, 6) << '\t' << fixed(r.metrics.f1, 6) << '\t' << r.confusion.tp
        << '\t' << r.confusion.fp << '\t' << r.confusion.fn << '\t' << r.confusion.tn << '\t' << r.folds
        << '\t' << r.fold_digest << '\n';
  });
  json list = json::array();
  for (const auto& r : reports)
    list.push_back({{"classifier", r.classifier},
                    {"accuracy", r.metrics.accuracy},
                    {"precision", r.metrics.precision},
                    {"recall", r.metrics.recall},
                    {"f1", r.metrics.f1},
                    {"precision_undefined", r.metrics.precision_undefined},
                    {"recall_undefined", r.metrics.recall_undefined},
                    {"f1_undefined", r.metrics.f1_undefined},
                    {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp},
                                   {"fn", r.confusion.fn}, {"tn", r.confusion.tn}}},
                    {"folds", r.folds},
                    {"fold_digest", r.fold_digest}});
  out.json("eval.json", {{"examples", ds.examples.size()}, {"reports", list}});
  for (const auto& r : reports)
    std::cout << r.classifier << "\taccuracy " << fixed(r.metrics.accuracy, 4) << "\tf1 "
              << fixed(r.metrics.f1, 4) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// reduction

int cmd_pca(const RunConfig& cfg) {
  Outputs out(cfg, "pca");
  require(cfg.matrix, "--matrix", "pca");
  out.add_input(cfg.matrix);
  const auto m = read_score_matrix(cfg.matrix);
  const auto r = pca(m, cfg.components, !cfg.no_standardize);
  const auto nc = static_cast<std::size_t>(r.loadings.cols());
  out.text("pca_loadings.tsv", [&](std::ostream& o) {
    o << "word";
    for (std::size_t c = 0; c < nc; ++c) o << "\tPC" << c + 1;
    o << '\n';
    for (std::size_t i = 0; i < r.row_labels.size(); ++i) {
      o << r.row_labels[i];
      for (std::size_t c = 0; c < nc; ++c)
        o << '\t' << fixed(r.loadings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)), 6);
      o << '\n';
    }
  });
  json comps = json::array();
  for (std::size_t c = 0; c < nc; ++c) {
    json top = json::array();
    for (const auto& t : top_loadings(r, c, cfg.top)) top.push_back({{"word", t.word}, {"loading", t.loading}});
    json dir = json::object();
    for (std::size_t j = 0; j < r.col_labels.size(); ++j)
      dir[r.col_labels[j]] = r.components(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
    comps.push_back({{"component", c + 1},
                     {"explained_variance_ratio", r.explained_variance_ratio[c]},
                     {"direction", dir},
                     {"top", top}});
  }
  out.json("pca.json", {{"standardized", r.standardized},
                        {"columns", r.col_labels},
                        {"dropped_columns", r.dropped_columns},
                        {"explained_variance_ratio", r.explained_variance_ratio},
                        {"components", comps}});
  for (std::size_t c = 0; c < nc; ++c)
    std::cout << "PC" << c + 1 << '\t' << fixed(r.explained_variance_ratio[c], 4) << '\n';
  return 0;
}

int cmd_mds(const RunConfig& cfg) {
  Outputs out(cfg, "mds");
  require(cfg.matrix, "--matrix", "mds");
  out.add_input(cfg.matrix);
  const auto m = read_score_matrix(cfg.matrix);
  const auto r = mds(m, cfg.p, cfg.dims, cfg.mds_max_iter, cfg.tol);
  out.text("mds_coordinates.tsv", [&](std::ostream& o) {
    o << "collection";
    for (std::size_t d = 0; d < cfg.dims; ++d) o << "\tdim" << d + 1;
    o << '\n';
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
      o << r.labels[i];
      for (std::size_t d = 0; d < cfg.dims; ++d)
        o << '\t' << fixed(r.coordinates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)), 6);
      o << '\n';
    }
  });
  json diss = json::array();
  for (Eigen::Index i = 0; i < r.dissimilarities.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.dissimilarities.cols(); ++j) row.push_back(r.dissimilarities(i, j));
    diss.push_back(row);
  }
  out.json("mds.json", {{"p", cfg.p},
                        {"labels", r.labels},
                        {"stress", r.stress},
                        {"iterations", r.iterations},
                        {"stress_trace", r.stress_trace},
                        {"dissimilarities", diss}});
  std::cout << "stress " << r.stress << " after " << r.iterations << " iteration(s)\n";
  return 0;
}

}  // namespace cuelex::cli
