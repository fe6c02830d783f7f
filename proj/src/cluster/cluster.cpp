#include "cluster/cluster.hpp"

#include <charconv>
#include <fstream>
#include <numeric>

#include "core/error.hpp"

namespace adanets {

UnionFind::UnionFind(std::int64_t n)
    : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

std::int32_t UnionFind::find(std::int32_t v) {
  // path halving
  while (v != parent_[static_cast<std::size_t>(v)]) {
    parent_[static_cast<std::size_t>(v)] =
        parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])];
    v = parent_[static_cast<std::size_t>(v)];
  }
  return v;
}

void UnionFind::unite(std::int32_t a, std::int32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (rank_[static_cast<std::size_t>(a)] < rank_[static_cast<std::size_t>(b)])
    std::swap(a, b);
  parent_[static_cast<std::size_t>(b)] = a;
  if (rank_[static_cast<std::size_t>(a)] == rank_[static_cast<std::size_t>(b)])
    ++rank_[static_cast<std::size_t>(a)];
}

std::vector<std::pair<std::int32_t, std::int32_t>> link_pairs(
    const FeatureMatrix& embeddings, const AdjacencyGraph& graph,
    double theta) {
  if (embeddings.n() != graph.n)
    throw_usage("link_pairs: embedding/vertex count mismatch");
  std::vector<std::pair<std::int32_t, std::int32_t>> kept;
  for (std::int64_t v = 0; v < graph.n; ++v) {
    for (std::int64_t e = graph.offsets[static_cast<std::size_t>(v)];
         e < graph.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
      std::int32_t c = graph.cols[static_cast<std::size_t>(e)];
      if (c <= v) continue;
      double sim = static_cast<double>(
          embeddings.data.row(v).dot(embeddings.data.row(c)));
      if (sim > theta) kept.emplace_back(static_cast<std::int32_t>(v), c);
    }
  }
  return kept;
}

ClusterAssignment union_find_merge(
    std::int64_t n,
    const std::vector<std::pair<std::int32_t, std::int32_t>>& edges) {
  UnionFind uf(n);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw_usage("union_find_merge: endpoint out of range");
    uf.unite(a, b);
  }
  ClusterAssignment out;
  out.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::int32_t> root_to_cluster(static_cast<std::size_t>(n), -1);
  std::int32_t next = 0;
  for (std::int64_t v = 0; v < n; ++v) {
    std::int32_t root = uf.find(static_cast<std::int32_t>(v));
    if (root_to_cluster[static_cast<std::size_t>(root)] < 0)
      root_to_cluster[static_cast<std::size_t>(root)] = next++;
    out.labels[static_cast<std::size_t>(v)] =
        root_to_cluster[static_cast<std::size_t>(root)];
  }
  out.num_clusters = next;
  return out;
}

ClusterAssignment graph_cut_baseline(const AdjacencyGraph& graph,
                                     double theta) {
  if (graph.weights.empty())
    throw_usage("graph_cut_baseline: graph carries no edge weights");
  std::vector<std::pair<std::int32_t, std::int32_t>> kept;
  for (std::int64_t v = 0; v < graph.n; ++v) {
    for (std::int64_t e = graph.offsets[static_cast<std::size_t>(v)];
         e < graph.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
      std::int32_t c = graph.cols[static_cast<std::size_t>(e)];
      if (c <= v) continue;
      if (static_cast<double>(graph.weights[static_cast<std::size_t>(e)]) >
          theta)
        kept.emplace_back(static_cast<std::int32_t>(v), c);
    }
  }
  return union_find_merge(graph.n, kept);
}

void save_clusters(const ClusterAssignment& clusters, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  for (std::int32_t c : clusters.labels) out << c << '\n';
  if (!out) throw_data("write failed: " + path);
}

ClusterAssignment load_clusters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open cluster file: " + path);
  ClusterAssignment out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::int32_t value = 0;
    auto [ptr, ec] =
        std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw_data("bad cluster id at " + path + ":" + std::to_string(lineno));
    out.labels.push_back(value);
    out.num_clusters = std::max(out.num_clusters, value + 1);
  }
  if (out.labels.empty()) throw_data("empty cluster file: " + path);
  return out;
}

}  // namespace adanets
