#include "structspace/structspace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace adanets {

namespace {

bool contains_in_first_k(const NeighborList& list, std::int32_t v, int k) {
  int limit = std::min<int>(k, static_cast<int>(list.ids.size()));
  for (int r = 0; r < limit; ++r)
    if (list.ids[r] == v) return true;
  return false;
}

ReciprocalSet reciprocal_set_unchecked(const std::vector<NeighborList>& knn,
                                       std::int32_t v, int k) {
  const NeighborList& list = knn[static_cast<std::size_t>(v)];
  ReciprocalSet out;
  out.vertex = v;
  int limit = std::min<int>(k, static_cast<int>(list.ids.size()));
  for (int r = 0; r < limit; ++r) {
    std::int32_t cand = list.ids[r];
    if (contains_in_first_k(knn[static_cast<std::size_t>(cand)], v, k))
      out.members.push_back(cand);
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

std::size_t intersection_size(const std::vector<std::int32_t>& a,
                              const std::vector<std::int32_t>& b) {
  std::size_t count = 0, ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib]) {
      ++ia;
    } else if (b[ib] < a[ia]) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace

ReciprocalSet reciprocal_set(const std::vector<NeighborList>& knn,
                             std::int32_t v, int k) {
  if (knn.empty()) throw_usage("reciprocal_set: empty knn input");
  if (k > static_cast<int>(knn[0].ids.size()))
    throw_usage("reciprocal_set: k exceeds stored candidate size");
  return reciprocal_set_unchecked(knn, v, k);
}

ReciprocalSet expanded_reciprocal_set(const std::vector<NeighborList>& knn,
                                      std::int32_t v, int k) {
  if (k < 2) throw_usage("expanded_reciprocal_set: k >= 2 violated");
  if (knn.empty() || k > static_cast<int>(knn[0].ids.size()))
    throw_usage("expanded_reciprocal_set: k exceeds stored candidate size");

  ReciprocalSet base = reciprocal_set_unchecked(knn, v, k);
  ReciprocalSet out = base;
  int half = k / 2;
  for (std::int32_t r : base.members) {
    ReciprocalSet half_set = reciprocal_set_unchecked(knn, r, half);
    std::size_t overlap = intersection_size(base.members, half_set.members);
    // 3*|R(v,k) n R(r,k/2)| >= 2*|R(r,k/2)|, exact in integers
    if (3 * overlap >= 2 * half_set.members.size()) {
      std::vector<std::int32_t> merged;
      merged.reserve(out.members.size() + half_set.members.size());
      std::set_union(out.members.begin(), out.members.end(),
                     half_set.members.begin(), half_set.members.end(),
                     std::back_inserter(merged));
      out.members = std::move(merged);
    }
  }
  return out;
}

double jaccard_similarity(const ReciprocalSet& a, const ReciprocalSet& b) {
  std::size_t inter = intersection_size(a.members, b.members);
  std::size_t uni = a.members.size() + b.members.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

StructureContext build_structure_context(const std::vector<NeighborList>& knn,
                                         int k, int threads) {
  StructureContext ctx;
  ctx.k = k;
  ctx.expanded.resize(knn.size());
  parallel_for(0, static_cast<std::int64_t>(knn.size()), threads,
               [&](std::int64_t v) {
                 ctx.expanded[static_cast<std::size_t>(v)] =
                     expanded_reciprocal_set(knn, static_cast<std::int32_t>(v),
                                             k);
               });
  return ctx;
}

double structure_similarity(const StructureContext& ctx, std::int32_t i,
                            std::int32_t j, double eta, double cos_ij) {
  if (eta < 0.0 || eta > 1.0) throw_usage("structure_similarity: eta in [0,1]");
  double jac = jaccard_similarity(ctx.expanded[static_cast<std::size_t>(i)],
                                  ctx.expanded[static_cast<std::size_t>(j)]);
  return (1.0 - eta) * jac + eta * cos_ij;
}

std::vector<StructureRanking> rerank_candidates(
    const std::vector<NeighborList>& knn, double eta, int k, int threads) {
  StructureContext ctx = build_structure_context(knn, k, threads);
  std::vector<StructureRanking> out(knn.size());
  parallel_for(0, static_cast<std::int64_t>(knn.size()), threads,
               [&](std::int64_t p) {
    const NeighborList& list = knn[static_cast<std::size_t>(p)];
    StructureRanking& ranking = out[static_cast<std::size_t>(p)];
    ranking.probe = list.probe;
    std::size_t m = list.ids.size();
    std::vector<double> kappa(m);
    for (std::size_t r = 0; r < m; ++r)
      kappa[r] = structure_similarity(ctx, list.probe, list.ids[r], eta,
                                      static_cast<double>(list.sims[r]));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return kappa[a] > kappa[b];
                     });
    ranking.ids.reserve(m);
    ranking.kappas.reserve(m);
    ranking.original_sims.reserve(m);
    for (std::size_t r : order) {
      ranking.ids.push_back(list.ids[r]);
      ranking.kappas.push_back(kappa[r]);
      ranking.original_sims.push_back(list.sims[r]);
    }
  });
  return out;
}

void save_rankings_tsv(const std::vector<StructureRanking>& rankings,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  char kbuf[64], cbuf[64];
  for (const StructureRanking& ranking : rankings) {
    for (std::size_t r = 0; r < ranking.ids.size(); ++r) {
      std::snprintf(kbuf, sizeof(kbuf), "%.17g", ranking.kappas[r]);
      std::snprintf(cbuf, sizeof(cbuf), "%.9g",
                    static_cast<double>(ranking.original_sims[r]));
      out << ranking.probe << '\t' << r << '\t' << ranking.ids[r] << '\t'
          << kbuf << '\t' << cbuf << '\n';
    }
  }
  if (!out) throw_data("write failed: " + path);
}

std::vector<StructureRanking> load_rankings_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open rankings file: " + path);
  std::vector<StructureRanking> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::int64_t probe, rank, id;
    double kappa, cosine;
    if (std::sscanf(line.c_str(), "%ld\t%ld\t%ld\t%lf\t%lf", &probe, &rank, &id,
                    &kappa, &cosine) != 5)
      throw_data("bad ranking line at " + path + ":" + std::to_string(lineno));
    if (probe < 0 || static_cast<std::size_t>(probe) > out.size())
      throw_data("out-of-order probe at " + path + ":" + std::to_string(lineno));
    if (static_cast<std::size_t>(probe) == out.size()) {
      out.emplace_back();
      out.back().probe = static_cast<std::int32_t>(probe);
    }
    StructureRanking& ranking = out.back();
    if (static_cast<std::size_t>(rank) != ranking.ids.size())
      throw_data("bad rank at " + path + ":" + std::to_string(lineno));
    ranking.ids.push_back(static_cast<std::int32_t>(id));
    ranking.kappas.push_back(kappa);
    ranking.original_sims.push_back(static_cast<float>(cosine));
  }
  if (out.empty()) throw_data("empty rankings file: " + path);
  return out;
}

}  // namespace adanets
