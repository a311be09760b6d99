#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cuelex/common.hpp"
#include "cuelex/embedding_store.hpp"
#include "cuelex/expansion.hpp"

namespace cuelex {

struct CueNode {
  std::string word;
  bool is_seed = false;
  Status status = Status::unrated;
};

/// Undirected edge with u < v (node indices).
struct CueEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

/// Word-similarity network. No self-loops, one edge per unordered pair,
/// weights in (0, 1].
class CueGraph {
 public:
  std::size_t add_node(CueNode node);
  /// Keeps the larger weight when the pair already exists. Throws on
  /// self-loops, unknown endpoints, or weights outside (0, 1].
  void add_edge(std::size_t u, std::size_t v, double weight);

  const std::vector<CueNode>& nodes() const { return nodes_; }
  /// Sorted by (u, v).
  std::vector<CueEdge> edges() const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::optional<std::size_t> find(std::string_view word) const;

  CueNode& node(std::size_t i) { return nodes_[i]; }
  const CueNode& node(std::size_t i) const { return nodes_[i]; }

  bool operator==(const CueGraph& other) const;

 private:
  std::vector<CueNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::pair<std::size_t, std::size_t>, double> edges_;
};

/// Community id per node index, dense from 0.
using Partition = std::vector<std::size_t>;
/// Score per node index.
using PageRankVector = std::vector<double>;

/// Nodes are folded seed surfaces plus every candidate in `pairs`, in first
/// appearance order (seeds first); edges are the retrieval pairs. Pairs with
/// non-positive similarity carry no edge.
CueGraph build_graph(const std::vector<CandidatePair>& pairs, const SeedLexicon& seeds,
                     const std::map<std::string, Status>& statuses);

/// Optional augmentation: adds an edge between every pair of nodes whose
/// model cosine is at least `threshold`. Nodes missing from the model are
/// skipped.
void augment_by_threshold(CueGraph& graph, const EmbeddingModel& model, double threshold);

/// Weighted Newman-Girvan modularity with resolution 1.
double modularity(const CueGraph& graph, const Partition& partition);

struct LouvainResult {
  Partition partition;
  /// Modularity after each aggregation pass, non-decreasing.
  std::vector<double> pass_modularity;
};

/// Blondel et al. local moves plus aggregation, repeated until no node
/// moves. Visit order is a shuffle seeded by rng_seed.
LouvainResult louvain_traced(const CueGraph& graph, double resolution, std::uint64_t rng_seed);
Partition louvain(const CueGraph& graph, double resolution = 1.0, std::uint64_t rng_seed = 0);

/// Relabels communities densely in order of first appearance.
Partition normalize_partition(const Partition& p);

/// Power iteration on the weight-proportional random walk. Mass on
/// isolated nodes is spread uniformly, so such nodes only collect teleport
/// mass. Throws std::runtime_error when max_iter passes without the L1
/// change falling below tol.
PageRankVector pagerank(const CueGraph& graph, double damping = 0.85, double tol = 1e-9,
                        std::size_t max_iter = 1000, Exec exec = Exec::parallel);

/// "<word> - <a> - <b>", a = seed flag, b = seed or accepted ("?" if unrated).
std::string format_label(std::string_view word, bool is_seed, Status status);

struct CompositionRow {
  std::size_t community = 0;
  std::size_t n_seed = 0;
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
  std::size_t n_unrated = 0;

  std::size_t size() const { return n_seed + n_accepted + n_rejected + n_unrated; }
};

/// Seeds count only as seeds. Sorted by size descending, then community.
std::vector<CompositionRow> composition(const CueGraph& graph, const Partition& partition);

// --- exports ---

void write_gexf(std::ostream& out, const CueGraph& graph, const Partition* partition,
                const PageRankVector* ranks);
void write_node_tsv(std::ostream& out, const CueGraph& graph, const Partition* partition,
                    const PageRankVector* ranks);
void write_edge_tsv(std::ostream& out, const CueGraph& graph);

struct LoadedGraph {
  CueGraph graph;
  std::optional<Partition> partition;
  std::optional<PageRankVector> ranks;
};

/// Reads the node/edge TSV pair written above. Community and pagerank
/// columns may be left empty.
LoadedGraph read_graph_tsv(const std::filesystem::path& nodes, const std::filesystem::path& edges);

}  // namespace cuelex
