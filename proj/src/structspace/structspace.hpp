#pragma once

#include <string>
#include <vector>

#include "knn/knn.hpp"

namespace adanets {

// Mutual-kNN set of one vertex, members sorted ascending. The vertex itself
// is never a member (candidate lists exclude the probe).
struct ReciprocalSet {
  std::int32_t vertex = 0;
  std::vector<std::int32_t> members;
};

// Candidate list of one probe reordered by the structure-space similarity.
struct StructureRanking {
  std::int32_t probe = 0;
  std::vector<std::int32_t> ids;
  std::vector<double> kappas;
  std::vector<float> original_sims;  // cosine, aligned with ids
};

// R(v,k): { r in N(v,k) : v in N(r,k) }.
ReciprocalSet reciprocal_set(const std::vector<NeighborList>& knn,
                             std::int32_t v, int k);

// R*(v,k): R(v,k) enlarged by every half-size set R(r,floor(k/2)) whose
// overlap with R(v,k) reaches 2/3, tested in integer arithmetic.
ReciprocalSet expanded_reciprocal_set(const std::vector<NeighborList>& knn,
                                      std::int32_t v, int k);

// |a n b| / |a u b|; 0 when both sets are empty.
double jaccard_similarity(const ReciprocalSet& a, const ReciprocalSet& b);

// Per-vertex R* sets computed once at the module's k and shared read-only.
struct StructureContext {
  int k = 0;
  std::vector<ReciprocalSet> expanded;
};

StructureContext build_structure_context(const std::vector<NeighborList>& knn,
                                         int k, int threads = 0);

// kappa = (1-eta) * s_jac + eta * s_cos.
double structure_similarity(const StructureContext& ctx, std::int32_t i,
                            std::int32_t j, double eta, double cos_ij);

// Stable re-sort of every candidate list by kappa descending; ties keep the
// original cosine order.
std::vector<StructureRanking> rerank_candidates(
    const std::vector<NeighborList>& knn, double eta, int k, int threads = 0);

// TSV: one line per (probe, rank, id, kappa, cosine).
void save_rankings_tsv(const std::vector<StructureRanking>& rankings,
                       const std::string& path);
std::vector<StructureRanking> load_rankings_tsv(const std::string& path);

}  // namespace adanets
