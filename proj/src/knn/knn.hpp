#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"

namespace adanets {

// Ranked candidate list of one probe vertex: ids by descending cosine
// similarity, ties broken by ascending vertex index, probe excluded.
struct NeighborList {
  std::int32_t probe = 0;
  std::vector<std::int32_t> ids;
  std::vector<float> sims;
};

// Dot product of two unit rows.
float cosine_similarity(const Eigen::Ref<const Eigen::RowVectorXf>& a,
                        const Eigen::Ref<const Eigen::RowVectorXf>& b);

// Exact top-k search over all probes. Parallel over probes; deterministic.
std::vector<NeighborList> build_knn(const FeatureMatrix& features, int k,
                                    int threads = 0);

// TSV export/import: one line per (probe, rank, id, sim).
void save_knn_tsv(const std::vector<NeighborList>& lists,
                  const std::string& path);
std::vector<NeighborList> load_knn_tsv(const std::string& path);

}  // namespace adanets
