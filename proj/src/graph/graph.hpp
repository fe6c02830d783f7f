#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"
#include "discovery/quality.hpp"

namespace adanets {

// Symmetric sparse graph in compressed row form. No self-loops are stored;
// the GCN adds the self-connection internally. Column indices are strictly
// increasing within each row. Edge weights carry the similarity that created
// the edge (diagnostics and the graph-cut baseline only).
struct AdjacencyGraph {
  std::int64_t n = 0;
  std::vector<std::int64_t> offsets;  // size n+1
  std::vector<std::int32_t> cols;
  std::vector<float> weights;  // aligned with cols; empty if unweighted

  std::int64_t num_edges() const {  // undirected count
    return static_cast<std::int64_t>(cols.size()) / 2;
  }
  std::int64_t degree(std::int64_t v) const {
    return offsets[static_cast<std::size_t>(v) + 1] -
           offsets[static_cast<std::size_t>(v)];
  }
  bool has_edge(std::int32_t i, std::int32_t j) const;
  void validate() const;
};

struct WeightedEdge {
  std::int32_t u = 0, v = 0;
  float w = 0.0f;
};

// Deduplicated symmetric CSR from an undirected edge list; parallel edges
// keep the maximum weight, self-loops are rejected.
AdjacencyGraph graph_from_edges(std::int64_t n,
                                const std::vector<WeightedEdge>& edges,
                                bool keep_weights = true);

// Edge {i,j} present iff either endpoint discovered the other.
AdjacencyGraph build_graph(const std::vector<StructureRanking>& truncated);

// Baseline: every vertex connected to its k nearest cosine neighbours.
AdjacencyGraph knn_graph(const std::vector<NeighborList>& knn, int k);

// Baseline: keep candidates with cosine similarity strictly above tau.
AdjacencyGraph threshold_graph(const std::vector<NeighborList>& knn,
                               double tau);

// (# same-label edges) / (# cross-label edges); +inf when no cross-label
// edge exists. Undirected edges counted once.
double snr(const AdjacencyGraph& graph, const LabelVector& labels);

// Adds round(rate * E) random non-existing undirected edges (weight 0).
AdjacencyGraph perturb_training_graph(const AdjacencyGraph& graph, double rate,
                                      std::uint64_t seed);

// TSV edge list "i<TAB>j<TAB>weight", i < j, sorted lexicographically.
void save_graph_tsv(const AdjacencyGraph& graph, const std::string& path);
AdjacencyGraph load_graph_tsv(const std::string& path, std::int64_t n);

}  // namespace adanets
