#include "knn/knn.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace adanets {

float cosine_similarity(const Eigen::Ref<const Eigen::RowVectorXf>& a,
                        const Eigen::Ref<const Eigen::RowVectorXf>& b) {
  if (a.size() != b.size()) throw_usage("cosine_similarity: dimension mismatch");
  return a.dot(b);
}

std::vector<NeighborList> build_knn(const FeatureMatrix& features, int k,
                                    int threads) {
  const Eigen::Index n = features.n();
  if (k < 1) throw_usage("build_knn: k >= 1 violated");
  if (k >= n) throw_usage("build_knn: k must be smaller than N");

  std::vector<NeighborList> out(static_cast<std::size_t>(n));
  const MatrixXf& feats = features.data;

  parallel_for(0, n, threads, [&](std::int64_t i) {
    // one dense similarity row per probe; N is desk scale
    Eigen::VectorXf sims = feats * feats.row(i).transpose();
    std::vector<std::int32_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + i);  // self-exclusion
    auto better = [&](std::int32_t a, std::int32_t b) {
      if (sims(a) != sims(b)) return sims(a) > sims(b);
      return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
    NeighborList& list = out[static_cast<std::size_t>(i)];
    list.probe = static_cast<std::int32_t>(i);
    list.ids.assign(order.begin(), order.begin() + k);
    list.sims.reserve(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) list.sims.push_back(sims(list.ids[r]));
  });
  return out;
}

void save_knn_tsv(const std::vector<NeighborList>& lists,
                  const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  char buf[64];
  for (const NeighborList& list : lists) {
    for (std::size_t r = 0; r < list.ids.size(); ++r) {
      // %.9g round-trips float32 exactly
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(list.sims[r]));
      out << list.probe << '\t' << r << '\t' << list.ids[r] << '\t' << buf
          << '\n';
    }
  }
  if (!out) throw_data("write failed: " + path);
}

std::vector<NeighborList> load_knn_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open knn file: " + path);
  std::vector<NeighborList> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::int64_t probe, rank, id;
    double sim;
    if (std::sscanf(line.c_str(), "%ld\t%ld\t%ld\t%lf", &probe, &rank, &id,
                    &sim) != 4)
      throw_data("bad knn line at " + path + ":" + std::to_string(lineno));
    if (probe < 0 || static_cast<std::size_t>(probe) > out.size())
      throw_data("out-of-order probe at " + path + ":" + std::to_string(lineno));
    if (static_cast<std::size_t>(probe) == out.size()) {
      out.emplace_back();
      out.back().probe = static_cast<std::int32_t>(probe);
    }
    NeighborList& list = out.back();
    if (static_cast<std::size_t>(rank) != list.ids.size())
      throw_data("bad rank at " + path + ":" + std::to_string(lineno));
    list.ids.push_back(static_cast<std::int32_t>(id));
    list.sims.push_back(static_cast<float>(sim));
  }
  if (out.empty()) throw_data("empty knn file: " + path);
  return out;
}

}  // namespace adanets
