#include "cuelex/cue_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "cuelex/kernels.hpp"

namespace cuelex {

// ---------------------------------------------------------------------------
// CueGraph

std::size_t CueGraph::add_node(CueNode node) {
  if (node.word.empty()) throw InputError("graph node with an empty word");
  auto [it, fresh] = index_.try_emplace(node.word, nodes_.size());
  if (!fresh) throw InputError("duplicate graph node '" + node.word + "'");
  nodes_.push_back(std::move(node));
  return it->second;
}

void CueGraph::add_edge(std::size_t u, std::size_t v, double weight) {
  if (u >= nodes_.size() || v >= nodes_.size()) throw InputError("edge endpoint out of range");
  if (u == v) throw InputError("self-loop on '" + nodes_[u].word + "'");
  if (!(weight > 0.0 && weight <= 1.0))
    throw InputError("edge weight outside (0, 1] between '" + nodes_[u].word + "' and '" +
                     nodes_[v].word + "'");
  auto key = std::minmax(u, v);
  auto [it, fresh] = edges_.try_emplace({key.first, key.second}, weight);
  if (!fresh) it->second = std::max(it->second, weight);
}

std::vector<CueEdge> CueGraph::edges() const {
  std::vector<CueEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, w] : edges_) out.push_back({key.first, key.second, w});
  return out;
}

std::optional<std::size_t> CueGraph::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool CueGraph::operator==(const CueGraph& other) const {
  if (edges_ != other.edges_ || nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& a = nodes_[i];
    const auto& b = other.nodes_[i];
    if (a.word != b.word || a.is_seed != b.is_seed || a.status != b.status) return false;
  }
  return true;
}

CueGraph build_graph(const std::vector<CandidatePair>& pairs, const SeedLexicon& seeds,
                     const std::map<std::string, Status>& statuses) {
  CueGraph g;
  auto status_of = [&](const std::string& w) {
    auto it = statuses.find(w);
    return it == statuses.end() ? Status::unrated : it->second;
  };
  auto ensure = [&](const std::string& w) {
    if (auto i = g.find(w)) return *i;
    return g.add_node({w, seeds.find(w) != nullptr, status_of(w)});
  };
  for (const auto& e : seeds.entries()) ensure(fold(e.surface));
  for (const auto& p : pairs) {
    if (p.seed.empty() || p.candidate.empty())
      throw InputError("retrieval pair references an empty token");
    ensure(p.candidate);
  }
  for (const auto& p : pairs) {
    if (p.similarity <= 0.0) continue;
    const auto u = g.find(p.seed);
    const auto v = g.find(p.candidate);
    if (!u || !v || *u == *v) continue;
    g.add_edge(*u, *v, std::min(p.similarity, 1.0));
  }
  return g;
}

void augment_by_threshold(CueGraph& graph, const EmbeddingModel& model, double threshold) {
  std::vector<std::pair<std::size_t, std::size_t>> present;  // graph index, model index
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    std::string form = graph.node(i).word;
    std::replace(form.begin(), form.end(), ' ', '_');
    if (auto m = model.resolve(form, true); m && model.usable(*m)) present.emplace_back(i, *m);
  }
  for (std::size_t a = 0; a < present.size(); ++a) {
    for (std::size_t b = a + 1; b < present.size(); ++b) {
      const double s = cosine(model, present[a].second, present[b].second);
      if (s >= threshold && s > 0.0) graph.add_edge(present[a].first, present[b].first, std::min(s, 1.0));
    }
  }
}

// ---------------------------------------------------------------------------
// Modularity and Louvain

namespace {

/// Weighted graph used across Louvain levels. `loop[i]` is the weight of
/// edges folded inside node i, counted from both ends.
struct WorkGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::vector<double> loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }
};

WorkGraph from_cue_graph(const CueGraph& g) {
  WorkGraph w;
  const std::size_t n = g.node_count();
  w.adj.resize(n);
  w.loop.assign(n, 0.0);
  w.degree.assign(n, 0.0);
  for (const auto& e : g.edges()) {
    w.adj[e.u].emplace_back(e.v, e.weight);
    w.adj[e.v].emplace_back(e.u, e.weight);
    w.degree[e.u] += e.weight;
    w.degree[e.v] += e.weight;
  }
  w.two_m = std::accumulate(w.degree.begin(), w.degree.end(), 0.0);
  return w;
}

double work_modularity(const WorkGraph& g, const std::vector<std::size_t>& comm, double resolution) {
  const std::size_t nc = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end()) + 1;
  std::vector<double> in(nc, 0.0), tot(nc, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    tot[comm[i]] += g.degree[i];
    in[comm[i]] += g.loop[i];
    for (const auto& [j, w] : g.adj[i])
      if (comm[j] == comm[i]) in[comm[i]] += w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const double f = tot[c] / g.two_m;
    q += in[c] / g.two_m - resolution * f * f;
  }
  return q;
}

/// One round of local moves; returns true if any node changed community.
bool local_moves(const WorkGraph& g, std::vector<std::size_t>& comm, double resolution,
                 std::mt19937_64& rng) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  bool any = false;
  constexpr double eps = 1e-12;
  while (true) {
    bool moved = false;
    for (std::size_t i : order) {
      const std::size_t own = comm[i];
      const double ki = g.degree[i];
      touched.clear();
      for (const auto& [j, w] : g.adj[i]) {
        const std::size_t c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[own] -= ki;
      const double scale = resolution * ki / g.two_m;
      double best_gain = link[own] - scale * tot[own];
      std::size_t best = own;
      for (std::size_t c : touched) {
        const double gain = link[c] - scale * tot[c];
        if (gain > best_gain + eps || (std::abs(gain - best_gain) <= eps && c < best && best != own)) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += ki;
      for (std::size_t c : touched) link[c] = 0.0;
      link[own] = 0.0;
      if (best != own) {
        comm[i] = best;
        moved = true;
        any = true;
      }
    }
    if (!moved) break;
  }
  return any;
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<std::size_t>& comm, std::size_t nc) {
  WorkGraph out;
  out.adj.resize(nc);
  out.loop.assign(nc, 0.0);
  out.degree.assign(nc, 0.0);
  out.two_m = g.two_m;
  std::vector<std::map<std::size_t, double>> acc(nc);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t ci = comm[i];
    out.degree[ci] += g.degree[i];
    out.loop[ci] += g.loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (comm[j] == ci)
        out.loop[ci] += w;
      else
        acc[ci][comm[j]] += w;
    }
  }
  for (std::size_t c = 0; c < nc; ++c)
    out.adj[c].assign(acc[c].begin(), acc[c].end());
  return out;
}

}  // namespace

double modularity(const CueGraph& graph, const Partition& partition) {
  if (graph.edge_count() == 0) throw InputError("modularity is undefined on an edgeless graph");
  if (partition.size() != graph.node_count())
    throw InputError("partition size does not match the graph");
  return work_modularity(from_cue_graph(graph), normalize_partition(partition), 1.0);
}

Partition normalize_partition(const Partition& p) {
  std::map<std::size_t, std::size_t> relabel;
  Partition out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto [it, fresh] = relabel.try_emplace(p[i], relabel.size());
    out[i] = it->second;
  }
  return out;
}

LouvainResult louvain_traced(const CueGraph& graph, double resolution, std::uint64_t rng_seed) {
  if (graph.edge_count() == 0) throw InputError("louvain needs a graph with at least one edge");
  std::mt19937_64 rng(rng_seed);
  WorkGraph level = from_cue_graph(graph);
  const WorkGraph base = level;

  Partition membership(graph.node_count());
  std::iota(membership.begin(), membership.end(), 0);

  LouvainResult r;
  r.pass_modularity.push_back(work_modularity(base, membership, resolution));
  while (true) {
    std::vector<std::size_t> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0);
    if (!local_moves(level, comm, resolution, rng)) break;
    comm = normalize_partition(comm);
    const std::size_t nc = *std::max_element(comm.begin(), comm.end()) + 1;
    for (auto& m : membership) m = comm[m];
    r.pass_modularity.push_back(work_modularity(base, membership, resolution));
    if (nc == level.size()) break;
    level = aggregate(level, comm, nc);
  }
  r.partition = normalize_partition(membership);
  return r;
}

Partition louvain(const CueGraph& graph, double resolution, std::uint64_t rng_seed) {
  return louvain_traced(graph, resolution, rng_seed).partition;
}

// ---------------------------------------------------------------------------
// PageRank

PageRankVector pagerank(const CueGraph& graph, double damping, double tol, std::size_t max_iter,
                        Exec exec) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw InputError("pagerank needs a non-empty graph");
  if (!(damping >= 0.0 && damping < 1.0)) throw InputError("damping must lie in [0, 1)");

  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  std::vector<double> degree(n, 0.0);
  for (const auto& e : graph.edges()) {
    adj[e.u].emplace_back(e.v, e.weight);
    adj[e.v].emplace_back(e.u, e.weight);
    degree[e.u] += e.weight;
    degree[e.v] += e.weight;
  }
  std::vector<std::size_t> offsets(n + 1, 0), targets;
  std::vector<double> coef;
  std::vector<std::size_t> dangling;
  for (std::size_t v = 0; v < n; ++v) {
    if (adj[v].empty()) dangling.push_back(v);
    for (const auto& [u, w] : adj[v]) {
      targets.push_back(u);
      coef.push_back(w / degree[u]);
    }
    offsets[v + 1] = targets.size();
  }
  const kernels::PullGraph pg{offsets, targets, coef};

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> cur(n, inv_n), next(n), diff(n);
  for (std::size_t it = 0; it < max_iter; ++it) {
    double dangling_mass = 0.0;
    for (std::size_t v : dangling) dangling_mass += cur[v];
    const double base = (1.0 - damping) * inv_n + damping * dangling_mass * inv_n;
    if (exec == Exec::parallel)
      kernels::pagerank_pull_omp(pg, cur, base, damping, next, diff);
    else
      kernels::pagerank_pull_serial(pg, cur, base, damping, next, diff);
    double change = 0.0;
    for (double d : diff) change += d;
    cur.swap(next);
    if (change < tol) {
      const double total = std::accumulate(cur.begin(), cur.end(), 0.0);
      for (double& x : cur) x /= total;
      return cur;
    }
  }
  throw std::runtime_error("pagerank did not converge within " + std::to_string(max_iter) +
                           " iterations");
}

// ---------------------------------------------------------------------------
// Labels and composition

std::string format_label(std::string_view word, bool is_seed, Status status) {
  std::string b = "0";
  if (is_seed || status == Status::accepted)
    b = "1";
  else if (status == Status::unrated)
    b = "?";
  return std::string(word) + " - " + (is_seed ? "1" : "0") + " - " + b;
}

std::vector<CompositionRow> composition(const CueGraph& graph, const Partition& partition) {
  if (partition.size() != graph.node_count())
    throw InputError("partition size does not match the graph");
  std::map<std::size_t, CompositionRow> rows;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    auto& r = rows[partition[i]];
    r.community = partition[i];
    const auto& node = graph.node(i);
    if (node.is_seed)
      ++r.n_seed;
    else if (node.status == Status::accepted)
      ++r.n_accepted;
    else if (node.status == Status::rejected)
      ++r.n_rejected;
    else
      ++r.n_unrated;
  }
  std::vector<CompositionRow> out;
  for (auto& [c, r] : rows) out.push_back(r);
  std::stable_sort(out.begin(), out.end(), [](const CompositionRow& a, const CompositionRow& b) {
    return a.size() > b.size();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Exports

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_sizes(const CueGraph& g, const Partition* p, const PageRankVector* r) {
  if ((p && p->size() != g.node_count()) || (r && r->size() != g.node_count()))
    throw InputError("partition or ranks do not match the graph");
}

std::vector<std::string_view> split_tabs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  while (true) {
    const auto e = s.find('\t', b);
    out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) return out;
    b = e + 1;
  }
}

/// Data lines of a TSV after '#' comments; the first is checked against
/// `header`.
std::vector<std::string> tsv_body(const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> rows;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header) throw InputError(path.string() + ": expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    rows.push_back(line);
  }
  if (!seen_header) throw InputError(path.string() + ": missing header");
  return rows;
}

}  // namespace

void write_gexf(std::ostream& out, const CueGraph& graph, const Partition* partition,
                const PageRankVector* ranks) {
  check_sizes(graph, partition, ranks);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n"
      << "  <meta>\n    <creator>cuelex " << kVersion << "</creator>\n  </meta>\n"
      << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n"
      << "    <attributes class=\"node\">\n"
      << "      <attribute id=\"seed\" title=\"seed\" type=\"boolean\"/>\n"
      << "      <attribute id=\"status\" title=\"status\" type=\"string\"/>\n";
  if (partition) out << "      <attribute id=\"community\" title=\"community\" type=\"integer\"/>\n";
  if (ranks) out << "      <attribute id=\"pagerank\" title=\"pagerank\" type=\"double\"/>\n";
  out << "    </attributes>\n    <nodes>\n";
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& n = graph.node(i);
    out << "      <node id=\"n" << i << "\" label=\""
        << xml_escape(format_label(n.word, n.is_seed, n.status)) << "\">\n"
        << "        <attvalues>\n"
        << "          <attvalue for=\"seed\" value=\"" << (n.is_seed ? "true" : "false") << "\"/>\n"
        << "          <attvalue for=\"status\" value=\"" << to_string(n.status) << "\"/>\n";
    if (partition)
      out << "          <attvalue for=\"community\" value=\"" << (*partition)[i] << "\"/>\n";
    if (ranks) out << "          <attvalue for=\"pagerank\" value=\"" << num((*ranks)[i]) << "\"/>\n";
    out << "        </attvalues>\n      </node>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  std::size_t id = 0;
  for (const auto& e : graph.edges()) {
    out << "      <edge id=\"e" << id++ << "\" source=\"n" << e.u << "\" target=\"n" << e.v
        << "\" weight=\"" << num(e.weight) << "\"/>\n";
  }
  out << "    </edges>\n  </graph>\n</gexf>\n";
}

void write_node_tsv(std::ostream& out, const CueGraph& graph, const Partition* partition,
                    const PageRankVector* ranks) {
  check_sizes(graph, partition, ranks);
  out << "word\tseed\tstatus\tcommunity\tpagerank\n";
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& n = graph.node(i);
    out << n.word << '\t' << (n.is_seed ? 1 : 0) << '\t' << to_string(n.status) << '\t';
    if (partition) out << (*partition)[i];
    out << '\t';
    if (ranks) out << num((*ranks)[i]);
    out << '\n';
  }
}

void write_edge_tsv(std::ostream& out, const CueGraph& graph) {
  out << "u\tv\tweight\n";
  for (const auto& e : graph.edges())
    out << graph.node(e.u).word << '\t' << graph.node(e.v).word << '\t' << num(e.weight) << '\n';
}

LoadedGraph read_graph_tsv(const std::filesystem::path& nodes, const std::filesystem::path& edges) {
  LoadedGraph r;
  Partition part;
  PageRankVector ranks;
  bool has_part = true, has_rank = true;
  for (const auto& line : tsv_body(nodes, "word\tseed\tstatus\tcommunity\tpagerank")) {
    const auto f = split_tabs(line);
    if (f.size() != 5 || (f[1] != "0" && f[1] != "1"))
      throw InputError(nodes.string() + ": malformed node row '" + line + "'");
    r.graph.add_node({std::string(f[0]), f[1] == "1", parse_status(f[2])});
    try {
      if (f[3].empty()) has_part = false;
      else part.push_back(std::stoull(std::string(f[3])));
      if (f[4].empty()) has_rank = false;
      else ranks.push_back(std::stod(std::string(f[4])));
    } catch (const std::exception&) {
      throw InputError(nodes.string() + ": malformed node row '" + line + "'");
    }
  }
  for (const auto& line : tsv_body(edges, "u\tv\tweight")) {
    const auto f = split_tabs(line);
    if (f.size() != 3) throw InputError(edges.string() + ": malformed edge row '" + line + "'");
    const auto u = r.graph.find(f[0]);
    const auto v = r.graph.find(f[1]);
    if (!u || !v) throw InputError(edges.string() + ": edge endpoint not among nodes: '" + line + "'");
    double w = 0.0;
    try {
      w = std::stod(std::string(f[2]));
    } catch (const std::exception&) {
      throw InputError(edges.string() + ": bad weight in '" + line + "'");
    }
    r.graph.add_edge(*u, *v, w);
  }
  if (has_part && r.graph.node_count() > 0) r.partition = std::move(part);
  if (has_rank && r.graph.node_count() > 0) r.ranks = std::move(ranks);
  return r;
}

}  // namespace cuelex
