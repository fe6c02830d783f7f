#include "graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace adanets {

bool AdjacencyGraph::has_edge(std::int32_t i, std::int32_t j) const {
  auto begin = cols.begin() + offsets[static_cast<std::size_t>(i)];
  auto end = cols.begin() + offsets[static_cast<std::size_t>(i) + 1];
  return std::binary_search(begin, end, j);
}

void AdjacencyGraph::validate() const {
  if (offsets.size() != static_cast<std::size_t>(n) + 1)
    throw_data("graph: offsets size mismatch");
  if (!weights.empty() && weights.size() != cols.size())
    throw_data("graph: weights size mismatch");
  for (std::int64_t v = 0; v < n; ++v) {
    for (std::int64_t e = offsets[static_cast<std::size_t>(v)];
         e < offsets[static_cast<std::size_t>(v) + 1]; ++e) {
      std::int32_t c = cols[static_cast<std::size_t>(e)];
      if (c < 0 || c >= n) throw_data("graph: column out of range");
      if (c == v) throw_data("graph: self-loop stored");
      if (e > offsets[static_cast<std::size_t>(v)] &&
          cols[static_cast<std::size_t>(e - 1)] >= c)
        throw_data("graph: columns not strictly increasing");
      if (!has_edge(c, static_cast<std::int32_t>(v)))
        throw_data("graph: asymmetric edge");
    }
  }
}

AdjacencyGraph graph_from_edges(std::int64_t n,
                                const std::vector<WeightedEdge>& edges,
                                bool keep_weights) {
  struct Entry {
    std::int32_t row, col;
    float w;
  };
  std::vector<Entry> entries;
  entries.reserve(edges.size() * 2);
  for (const WeightedEdge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw_usage("graph_from_edges: endpoint out of range");
    if (e.u == e.v) throw_usage("graph_from_edges: self-loop");
    entries.push_back({e.u, e.v, e.w});
    entries.push_back({e.v, e.u, e.w});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.w > b.w;  // duplicate keeps the max weight (first after sort)
  });

  AdjacencyGraph g;
  g.n = n;
  g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].row == entries[i - 1].row &&
        entries[i].col == entries[i - 1].col)
      continue;
    g.cols.push_back(entries[i].col);
    if (keep_weights) g.weights.push_back(entries[i].w);
    ++g.offsets[static_cast<std::size_t>(entries[i].row) + 1];
  }
  for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v)
    g.offsets[v + 1] += g.offsets[v];
  return g;
}

AdjacencyGraph build_graph(const std::vector<StructureRanking>& truncated) {
  std::int64_t n = static_cast<std::int64_t>(truncated.size());
  std::vector<WeightedEdge> edges;
  for (const StructureRanking& ranking : truncated) {
    for (std::size_t r = 0; r < ranking.ids.size(); ++r)
      edges.push_back({ranking.probe, ranking.ids[r],
                       static_cast<float>(ranking.kappas[r])});
  }
  return graph_from_edges(n, edges);
}

AdjacencyGraph knn_graph(const std::vector<NeighborList>& knn, int k) {
  std::int64_t n = static_cast<std::int64_t>(knn.size());
  std::vector<WeightedEdge> edges;
  for (const NeighborList& list : knn) {
    int limit = std::min<int>(k, static_cast<int>(list.ids.size()));
    for (int r = 0; r < limit; ++r)
      edges.push_back({list.probe, list.ids[static_cast<std::size_t>(r)],
                       list.sims[static_cast<std::size_t>(r)]});
  }
  return graph_from_edges(n, edges);
}

AdjacencyGraph threshold_graph(const std::vector<NeighborList>& knn,
                               double tau) {
  if (tau <= -1.0 || tau >= 1.0)
    throw_usage("threshold_graph: tau in (-1,1) violated");
  std::int64_t n = static_cast<std::int64_t>(knn.size());
  std::vector<WeightedEdge> edges;
  for (const NeighborList& list : knn) {
    for (std::size_t r = 0; r < list.ids.size(); ++r)
      if (static_cast<double>(list.sims[r]) > tau)
        edges.push_back({list.probe, list.ids[r], list.sims[r]});
  }
  return graph_from_edges(n, edges);
}

double snr(const AdjacencyGraph& graph, const LabelVector& labels) {
  if (labels.size() != graph.n) throw_usage("snr: label/vertex count mismatch");
  std::int64_t correct = 0, noise = 0;
  for (std::int64_t v = 0; v < graph.n; ++v) {
    for (std::int64_t e = graph.offsets[static_cast<std::size_t>(v)];
         e < graph.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
      std::int32_t c = graph.cols[static_cast<std::size_t>(e)];
      if (c <= v) continue;  // count each undirected edge once
      if (labels.labels[static_cast<std::size_t>(v)] ==
          labels.labels[static_cast<std::size_t>(c)])
        ++correct;
      else
        ++noise;
    }
  }
  if (noise == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(correct) / static_cast<double>(noise);
}

AdjacencyGraph perturb_training_graph(const AdjacencyGraph& graph, double rate,
                                      std::uint64_t seed) {
  if (rate < 0.0 || rate >= 1.0)
    throw_usage("perturb_training_graph: rate in [0,1) violated");
  std::int64_t extra = std::llround(rate * static_cast<double>(graph.num_edges()));
  if (extra == 0) return graph;
  if (graph.n < 2) throw_usage("perturb_training_graph: graph too small");

  std::vector<WeightedEdge> edges;
  for (std::int64_t v = 0; v < graph.n; ++v)
    for (std::int64_t e = graph.offsets[static_cast<std::size_t>(v)];
         e < graph.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
      std::int32_t c = graph.cols[static_cast<std::size_t>(e)];
      if (c > v)
        edges.push_back({static_cast<std::int32_t>(v), c,
                         graph.weights.empty()
                             ? 0.0f
                             : graph.weights[static_cast<std::size_t>(e)]});
    }

  Rng rng(seed);
  std::set<std::pair<std::int32_t, std::int32_t>> fresh;
  std::int64_t added = 0;
  while (added < extra) {
    auto u = static_cast<std::int32_t>(rng.uniform_int(
        static_cast<std::uint64_t>(graph.n)));
    auto v = static_cast<std::int32_t>(rng.uniform_int(
        static_cast<std::uint64_t>(graph.n)));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (graph.has_edge(u, v)) continue;
    if (!fresh.insert({u, v}).second) continue;
    edges.push_back({u, v, 0.0f});
    ++added;
  }
  return graph_from_edges(graph.n, edges, !graph.weights.empty());
}

void save_graph_tsv(const AdjacencyGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  char buf[64];
  for (std::int64_t v = 0; v < graph.n; ++v) {
    for (std::int64_t e = graph.offsets[static_cast<std::size_t>(v)];
         e < graph.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
      std::int32_t c = graph.cols[static_cast<std::size_t>(e)];
      if (c <= v) continue;
      float w = graph.weights.empty() ? 0.0f
                                      : graph.weights[static_cast<std::size_t>(e)];
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(w));
      out << v << '\t' << c << '\t' << buf << '\n';
    }
  }
  if (!out) throw_data("write failed: " + path);
}

AdjacencyGraph load_graph_tsv(const std::string& path, std::int64_t n) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open graph file: " + path);
  std::vector<WeightedEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::int64_t u, v;
    double w;
    if (std::sscanf(line.c_str(), "%ld\t%ld\t%lf", &u, &v, &w) != 3)
      throw_data("bad graph line at " + path + ":" + std::to_string(lineno));
    edges.push_back({static_cast<std::int32_t>(u), static_cast<std::int32_t>(v),
                     static_cast<float>(w)});
  }
  return graph_from_edges(n, edges);
}

}  // namespace adanets
