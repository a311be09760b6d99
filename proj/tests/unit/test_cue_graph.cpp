#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "cuelex/common.hpp"
#include "cuelex/cue_graph.hpp"
#include "oracles.hpp"

using namespace cuelex;

namespace {

CueGraph graph_from(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  CueGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node({"n" + std::to_string(i), false, Status::unrated});
  for (auto [u, v, w] : edges) g.add_edge(u, v, w);
  return g;
}

oracle::Dense dense_of(const CueGraph& g) {
  oracle::Dense w(g.node_count(), std::vector<double>(g.node_count(), 0.0));
  for (const auto& e : g.edges()) w[e.u][e.v] = w[e.v][e.u] = e.weight;
  return w;
}

CueGraph two_triangles() {
  return graph_from(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
}

CueGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(rng) < p) edges.emplace_back(i, j, 0.05 + 0.95 * u(rng));
  if (edges.empty()) edges.emplace_back(0, 1, 0.5);
  return graph_from(n, edges);
}

SeedLexicon lexicon_of(const std::string& text) {
  std::istringstream in(text);
  return parse_lexicon(in);
}

}  // namespace

TEST_CASE("graph invariants") {
  CueGraph g;
  const auto a = g.add_node({"a", true, Status::unrated});
  const auto b = g.add_node({"b", false, Status::accepted});
  CHECK_THROWS_AS(g.add_node({"a", false, Status::unrated}), InputError);
  CHECK_THROWS_AS(g.add_node({"", false, Status::unrated}), InputError);
  CHECK_THROWS_AS(g.add_edge(a, a, 0.5), InputError);
  CHECK_THROWS_AS(g.add_edge(a, b, 0.0), InputError);
  CHECK_THROWS_AS(g.add_edge(a, b, 1.5), InputError);
  CHECK_THROWS_AS(g.add_edge(a, 7, 0.5), InputError);
  g.add_edge(b, a, 0.4);
  g.add_edge(a, b, 0.7);
  g.add_edge(a, b, 0.6);
  REQUIRE(g.edge_count() == 1);
  CHECK(g.edges()[0].u == 0);
  CHECK(g.edges()[0].weight == 0.7);
}

TEST_CASE("build from pairs") {
  const auto lex = lexicon_of("s\nt\n");
  std::vector<CandidatePair> pairs = {{"s", "a", 0.7, "m", "", ""},
                                      {"s", "a", 0.6, "m", "", ""},
                                      {"t", "b", 0.5, "m", "", ""},
                                      {"t", "a", -0.2, "m", "", ""}};
  std::map<std::string, Status> statuses = {{"a", Status::accepted}, {"b", Status::rejected}};
  const auto g = build_graph(pairs, lex, statuses);
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 2);
  CHECK(g.node(*g.find("s")).is_seed);
  CHECK(g.node(*g.find("a")).status == Status::accepted);
  CHECK(g.edges()[0].weight == 0.7);
  CHECK(build_graph(pairs, lex, statuses) == g);

  const auto bare = build_graph({}, lex, {});
  CHECK(bare.node_count() == 2);
  CHECK(bare.edge_count() == 0);

  std::vector<CandidatePair> bad = {{"s", "", 0.5, "m", "", ""}};
  CHECK_THROWS_AS(build_graph(bad, lex, {}), InputError);
}

TEST_CASE("build counts match enumeration") {
  std::mt19937_64 rng(12);
  const auto lex = lexicon_of("s0\ns1\ns2\n");
  std::vector<CandidatePair> pairs;
  std::set<std::string> nodes = {"s0", "s1", "s2"};
  std::set<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < 60; ++i) {
    const std::string s = "s" + std::to_string(rng() % 3);
    const std::string c = "c" + std::to_string(rng() % 15);
    pairs.push_back({s, c, 0.1 + 0.01 * static_cast<double>(rng() % 80), "m", "", ""});
    nodes.insert(c);
    edges.insert(std::minmax(s, c));
  }
  const auto g = build_graph(pairs, lex, {});
  CHECK(g.node_count() == nodes.size());
  CHECK(g.edge_count() == edges.size());
}

TEST_CASE("modularity hand cases") {
  const auto tri = two_triangles();
  CHECK(modularity(tri, {0, 0, 0, 1, 1, 1}) == 0.5);
  CHECK(std::abs(modularity(tri, {0, 0, 0, 0, 0, 0})) < 1e-15);
  CHECK(modularity(tri, {5, 5, 5, 2, 2, 2}) == modularity(tri, {0, 0, 0, 1, 1, 1}));
  const auto pair = graph_from(2, {{0, 1, 1}});
  CHECK(modularity(pair, {0, 1}) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS_AS(modularity(graph_from(3, {}), {0, 1, 2}), InputError);
}

TEST_CASE("modularity agrees with the dense formula") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = random_graph(rng, 9, 0.4);
    Partition p(9);
    for (auto& x : p) x = rng() % 3;
    CHECK(modularity(g, p) == doctest::Approx(oracle::modularity(dense_of(g), p)).epsilon(1e-12));
  }
}

TEST_CASE("louvain on disconnected triangles") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = louvain(two_triangles(), 1.0, seed);
    CHECK(p[0] == p[1]);
    CHECK(p[1] == p[2]);
    CHECK(p[3] == p[4]);
    CHECK(p[4] == p[5]);
    CHECK(p[0] != p[3]);
  }
  CHECK_THROWS_AS(louvain(graph_from(2, {})), InputError);
}

TEST_CASE("louvain bounded by exhaustive optimum on 8 nodes") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 12; ++rep) {
    const auto g = random_graph(rng, 8, 0.35);
    const auto w = dense_of(g);
    const auto traced = louvain_traced(g, 1.0, static_cast<std::uint64_t>(rep));
    const double q = modularity(g, traced.partition);
    Partition singles(8);
    std::iota(singles.begin(), singles.end(), 0);
    const double best = oracle::best_modularity(w);
    CHECK(q >= modularity(g, singles) - 1e-12);
    CHECK(q <= best + 1e-12);
    for (std::size_t i = 1; i < traced.pass_modularity.size(); ++i)
      CHECK(traced.pass_modularity[i] >= traced.pass_modularity[i - 1] - 1e-12);
    CHECK(louvain(g, 1.0, 5) == louvain(g, 1.0, 5));
  }
}

TEST_CASE("louvain never merges components") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = random_graph(rng, 7, 0.5);
    const auto b = random_graph(rng, 6, 0.5);
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (const auto& e : a.edges()) edges.emplace_back(e.u, e.v, e.weight);
    for (const auto& e : b.edges()) edges.emplace_back(e.u + 7, e.v + 7, e.weight);
    const auto g = graph_from(13, edges);
    const auto p = louvain(g, 1.0, static_cast<std::uint64_t>(rep));
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 7; j < 13; ++j) CHECK(p[i] != p[j]);
  }
}

TEST_CASE("pagerank") {
  const auto two = pagerank(graph_from(2, {{0, 1, 0.3}}));
  CHECK(two[0] == doctest::Approx(0.5).epsilon(1e-9));

  const auto path = graph_from(3, {{0, 1, 1}, {1, 2, 1}});
  const auto r = pagerank(path, 0.85);
  const auto o = oracle::pagerank(dense_of(path), 0.85);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r[i] - o[i]) < 1e-6);
  CHECK(std::abs(r[0] - 0.2568) < 1e-4);
  CHECK(std::abs(r[1] - 0.4865) < 1e-4);

  std::vector<std::tuple<std::size_t, std::size_t, double>> k5;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) k5.emplace_back(i, j, 1.0);
  for (double x : pagerank(graph_from(5, k5))) CHECK(x == doctest::Approx(0.2).epsilon(1e-9));

  CHECK_THROWS_AS(pagerank(CueGraph{}), InputError);
  CHECK_THROWS(pagerank(path, 0.85, 1e-300, 3));
}

TEST_CASE("pagerank matches the dense oracle, sums to one, ignores weight scale") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 15; ++rep) {
    const auto g = random_graph(rng, 12, 0.2);  // isolated nodes likely
    const auto r = pagerank(g);
    const auto serial = pagerank(g, 0.85, 1e-9, 1000, Exec::serial);
    const auto o = oracle::pagerank(dense_of(g), 0.85);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r[i] >= 0.0);
      CHECK(std::abs(r[i] - o[i]) < 1e-6);
      CHECK(r[i] == serial[i]);
      sum += r[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);

    std::vector<std::tuple<std::size_t, std::size_t, double>> half;
    for (const auto& e : g.edges()) half.emplace_back(e.u, e.v, e.weight * 0.5);
    const auto rs = pagerank(graph_from(g.node_count(), half));
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(rs[i] - r[i]) < 1e-9);
  }
}

TEST_CASE("labels") {
  CHECK(format_label("paradox", true, Status::unrated) == "paradox - 1 - 1");
  CHECK(format_label("inaccurate", false, Status::accepted) == "inaccurate - 0 - 1");
  CHECK(format_label("erroneous", false, Status::rejected) == "erroneous - 0 - 0");
  CHECK(format_label("maybe", false, Status::unrated) == "maybe - 0 - ?");
}

TEST_CASE("composition") {
  CueGraph g;
  g.add_node({"a", true, Status::unrated});
  g.add_node({"b", true, Status::accepted});
  g.add_node({"c", false, Status::accepted});
  const auto rows = composition(g, {0, 0, 0});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_seed == 2);
  CHECK(rows[0].n_accepted == 1);
  CHECK(rows[0].n_rejected == 0);
  CHECK(rows[0].n_unrated == 0);

  std::mt19937_64 rng(5);
  CueGraph big;
  Partition p;
  std::map<std::size_t, std::array<std::size_t, 4>> tally;
  for (int i = 0; i < 200; ++i) {
    const bool seed = rng() % 5 == 0;
    const auto st = static_cast<Status>(rng() % 3);
    big.add_node({"w" + std::to_string(i), seed, st});
    p.push_back(rng() % 7);
    auto& t = tally[p.back()];
    if (seed) ++t[0];
    else if (st == Status::accepted) ++t[1];
    else if (st == Status::rejected) ++t[2];
    else ++t[3];
  }
  const auto got = composition(big, p);
  CHECK(got.size() == tally.size());
  for (const auto& r : got) {
    const auto& t = tally.at(r.community);
    CHECK(r.n_seed == t[0]);
    CHECK(r.n_accepted == t[1]);
    CHECK(r.n_rejected == t[2]);
    CHECK(r.n_unrated == t[3]);
  }
  for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].size() >= got[i].size());
}

TEST_CASE("exports") {
  CueGraph g;
  g.add_node({"paradox", true, Status::unrated});
  g.add_node({"inaccurate", false, Status::accepted});
  g.add_edge(0, 1, 0.625);
  const Partition p = {0, 0};
  const auto r = pagerank(g);

  std::ostringstream gexf;
  write_gexf(gexf, g, &p, &r);
  const auto x = gexf.str();
  CHECK(x.find("<gexf") != std::string::npos);
  CHECK(x.find("paradox - 1 - 1") != std::string::npos);
  CHECK(x.find("defaultedgetype=\"undirected\"") != std::string::npos);

  std::ostringstream empty;
  write_gexf(empty, CueGraph{}, nullptr, nullptr);
  CHECK(empty.str().find("<nodes>") != std::string::npos);
  CHECK(empty.str().find("<node ") == std::string::npos);

  const auto dir = std::filesystem::temp_directory_path();
  const auto np = dir / "cuelex_nodes.tsv", ep = dir / "cuelex_edges.tsv";
  {
    std::ofstream n(np), e(ep);
    write_node_tsv(n, g, &p, &r);
    write_edge_tsv(e, g);
  }
  const auto back = read_graph_tsv(np, ep);
  CHECK(back.graph == g);
  REQUIRE(back.partition.has_value());
  CHECK(*back.partition == p);
  REQUIRE(back.ranks.has_value());
  CHECK((*back.ranks)[0] == r[0]);
  CHECK((*back.ranks)[1] == r[1]);
  CHECK(std::abs((*back.ranks)[0] + (*back.ranks)[1] - 1.0) < 1e-6);
}
