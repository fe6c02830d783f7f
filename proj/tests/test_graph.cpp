#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "graph/graph.hpp"
#include "test_util.hpp"

using namespace adanets;

namespace {

StructureRanking make_ranking(std::int32_t probe,
                              std::vector<std::int32_t> ids) {
  StructureRanking r;
  r.probe = probe;
  r.ids = std::move(ids);
  r.kappas.assign(r.ids.size(), 0.5);
  r.original_sims.assign(r.ids.size(), 0.5f);
  return r;
}

AdjacencyGraph random_graph(std::int64_t n, double density,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WeightedEdge> edges;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j)
      if (rng.uniform() < density)
        edges.push_back({i, j, static_cast<float>(rng.uniform())});
  return graph_from_edges(n, edges);
}

}  // namespace

TEST_CASE("graph_from_edges symmetrizes, dedupes, and sorts") {
  std::vector<WeightedEdge> edges = {{0, 1, 0.5f}, {1, 0, 0.9f}, {2, 1, 0.3f}};
  AdjacencyGraph g = graph_from_edges(3, edges);
  g.validate();
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK(g.has_edge(1, 2));
  CHECK(!g.has_edge(0, 2));
  // parallel edges keep the max weight
  CHECK(g.weights[static_cast<std::size_t>(g.offsets[0])] == 0.9f);
  CHECK(g.degree(1) == 2);

  CHECK_THROWS_AS(graph_from_edges(3, {{1, 1, 0.5f}}), AdaError);
}

TEST_CASE("discovery graph uses the OR rule") {
  // 0 discovers 1, 1 does not discover 0 -> edge still present
  std::vector<StructureRanking> truncated;
  truncated.push_back(make_ranking(0, {1}));
  truncated.push_back(make_ranking(1, {2}));
  truncated.push_back(make_ranking(2, {1}));
  AdjacencyGraph g = build_graph(truncated);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK(g.num_edges() == 2);
}

TEST_CASE("discovery graph equals the dense boolean oracle") {
  Rng rng(41);
  std::int32_t n = 40;
  std::vector<StructureRanking> truncated;
  for (std::int32_t v = 0; v < n; ++v) {
    std::set<std::int32_t> picks;
    int m = 1 + static_cast<int>(rng.uniform_int(5));
    while (static_cast<int>(picks.size()) < m) {
      auto c = static_cast<std::int32_t>(rng.uniform_int(static_cast<std::uint64_t>(n)));
      if (c != v) picks.insert(c);
    }
    truncated.push_back(
        make_ranking(v, {picks.begin(), picks.end()}));
  }
  AdjacencyGraph g = build_graph(truncated);
  g.validate();

  // dense oracle: edge iff either side lists the other
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j) {
      auto lists = [&](std::int32_t a, std::int32_t b) {
        const auto& ids = truncated[static_cast<std::size_t>(a)].ids;
        return std::find(ids.begin(), ids.end(), b) != ids.end();
      };
      CHECK(g.has_edge(i, j) == (lists(i, j) || lists(j, i)));
    }
}

TEST_CASE("knn graph baseline") {
  std::vector<NeighborList> knn(2);
  knn[0] = {0, {1}, {0.9f}};
  knn[1] = {1, {0}, {0.9f}};
  AdjacencyGraph g = knn_graph(knn, 1);
  CHECK(g.num_edges() == 1);
  CHECK(g.has_edge(0, 1));

  // symmetrization keeps degree >= k
  Rng rng(13);
  std::int32_t n = 30;
  std::vector<NeighborList> lists(static_cast<std::size_t>(n));
  for (std::int32_t v = 0; v < n; ++v) {
    lists[static_cast<std::size_t>(v)].probe = v;
    std::set<std::int32_t> picks;
    while (picks.size() < 4) {
      auto c = static_cast<std::int32_t>(rng.uniform_int(static_cast<std::uint64_t>(n)));
      if (c != v) picks.insert(c);
    }
    for (std::int32_t c : picks) {
      lists[static_cast<std::size_t>(v)].ids.push_back(c);
      lists[static_cast<std::size_t>(v)].sims.push_back(0.5f);
    }
  }
  AdjacencyGraph kg = knn_graph(lists, 4);
  for (std::int32_t v = 0; v < n; ++v) CHECK(kg.degree(v) >= 4);
}

TEST_CASE("threshold graph keeps strictly-above candidates") {
  std::vector<NeighborList> knn(2);
  knn[0] = {0, {1}, {0.5f}};  // exactly representable
  knn[1] = {1, {0}, {0.5f}};
  CHECK(threshold_graph(knn, 0.5).num_edges() == 0);   // strict >
  CHECK(threshold_graph(knn, 0.25).num_edges() == 1);
  CHECK(threshold_graph(knn, 0.9).num_edges() == 0);   // tau >= max sim

  // tau below the minimum similarity reproduces the knn graph
  AdjacencyGraph a = threshold_graph(knn, -0.99);
  AdjacencyGraph b = knn_graph(knn, 1);
  CHECK(a.cols == b.cols);
  CHECK(a.offsets == b.offsets);

  CHECK_THROWS_AS(threshold_graph(knn, 1.0), AdaError);
  CHECK_THROWS_AS(threshold_graph(knn, -1.0), AdaError);
}

TEST_CASE("snr counts and sentinel") {
  LabelVector labels{{0, 0, 0, 0, 1}};
  // 3 correct edges, 1 noise edge
  AdjacencyGraph g = graph_from_edges(
      5, {{0, 1, 1.0f}, {1, 2, 1.0f}, {2, 3, 1.0f}, {3, 4, 1.0f}});
  CHECK(snr(g, labels) == doctest::Approx(3.0));

  AdjacencyGraph clean = graph_from_edges(5, {{0, 1, 1.0f}, {2, 3, 1.0f}});
  CHECK(std::isinf(snr(clean, labels)));

  // random recount oracle
  Rng rng(19);
  AdjacencyGraph r = random_graph(50, 0.2, 23);
  LabelVector rl;
  for (int i = 0; i < 50; ++i)
    rl.labels.push_back(static_cast<std::int32_t>(rng.uniform_int(4)));
  std::int64_t same = 0, cross = 0;
  for (std::int32_t v = 0; v < 50; ++v)
    for (std::int64_t e = r.offsets[static_cast<std::size_t>(v)];
         e < r.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
      std::int32_t u = r.cols[static_cast<std::size_t>(e)];
      if (u <= v) continue;
      (rl.labels[static_cast<std::size_t>(v)] ==
               rl.labels[static_cast<std::size_t>(u)]
           ? same
           : cross)++;
    }
  CHECK(snr(r, rl) ==
        doctest::Approx(static_cast<double>(same) / static_cast<double>(cross)));
}

TEST_CASE("training-graph perturbation adds the exact edge budget") {
  AdjacencyGraph g = random_graph(40, 0.15, 3);
  std::int64_t e = g.num_edges();

  AdjacencyGraph same = perturb_training_graph(g, 0.0, 7);
  CHECK(same.cols == g.cols);
  CHECK(same.offsets == g.offsets);

  AdjacencyGraph noisy = perturb_training_graph(g, 0.1, 7);
  CHECK(noisy.num_edges() == e + std::llround(0.1 * static_cast<double>(e)));

  // every original edge is still present; added edges are new
  for (std::int32_t v = 0; v < 40; ++v)
    for (std::int64_t i = g.offsets[static_cast<std::size_t>(v)];
         i < g.offsets[static_cast<std::size_t>(v) + 1]; ++i)
      CHECK(noisy.has_edge(v, g.cols[static_cast<std::size_t>(i)]));
}

TEST_CASE("graph tsv round trip") {
  testutil::TempDir dir("graph");
  AdjacencyGraph g = random_graph(25, 0.3, 77);
  save_graph_tsv(g, dir.file("g.tsv"));
  AdjacencyGraph back = load_graph_tsv(dir.file("g.tsv"), 25);
  CHECK(back.offsets == g.offsets);
  CHECK(back.cols == g.cols);
  CHECK(back.weights == g.weights);
  CHECK_THROWS_AS(load_graph_tsv(dir.file("missing.tsv"), 25), AdaError);
}
