#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"
#include "graph/graph.hpp"

namespace adanets {

// Dense 0-based cluster ids, one per vertex, densified by smallest member.
struct ClusterAssignment {
  std::vector<std::int32_t> labels;
  std::int32_t num_clusters = 0;
};

class UnionFind {
 public:
  explicit UnionFind(std::int64_t n);
  std::int32_t find(std::int32_t v);
  void unite(std::int32_t a, std::int32_t b);

 private:
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> rank_;
};

// Graph edges whose embedding cosine similarity is strictly above theta.
std::vector<std::pair<std::int32_t, std::int32_t>> link_pairs(
    const FeatureMatrix& embeddings, const AdjacencyGraph& graph, double theta);

// Connected components of the kept edges, ids in smallest-member order.
ClusterAssignment union_find_merge(
    std::int64_t n,
    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges);

// Appendix baseline: drop edges with construction weight <= theta, then
// take components. No GCN involved.
ClusterAssignment graph_cut_baseline(const AdjacencyGraph& graph, double theta);

// One cluster id per line, aligned with input order.
void save_clusters(const ClusterAssignment& clusters, const std::string& path);
ClusterAssignment load_clusters(const std::string& path);

}  // namespace adanets
