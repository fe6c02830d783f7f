#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cluster/cluster.hpp"
#include "core/types.hpp"
#include "discovery/quality.hpp"

namespace adanets {

struct PrfTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct MetricsReport {
  PrfTriple pairwise;
  PrfTriple bcubed;
  double snr = 0.0;  // +inf sentinel when the graph has no noise edges
  double q_before = 0.0;
  double q_after = 0.0;
  std::vector<RocPoint> roc;

  std::string to_json_text() const;
  static MetricsReport from_json_text(const std::string& text);
};

// Pair counting via per-cluster/per-class contingency sums, O(N + cells).
// Zero predicted-positive pairs: precision 1 if also zero truth pairs else 0.
PrfTriple pairwise_f(const ClusterAssignment& pred, const LabelVector& truth);

// Item-averaged BCubed with the item counted in its own cluster and class.
PrfTriple bcubed_f(const ClusterAssignment& pred, const LabelVector& truth);

// Means over probes of Q(k) and Q at the given truncation point per probe.
std::pair<double, double> q_summary(const std::vector<QualityCurve>& curves,
                                    const std::vector<int>& truncation);

// Seeded uniform pair sample; thresholds swept over observed similarities.
// Points are sorted by fpr and include (0,0) and (1,1).
std::vector<RocPoint> roc_points(const FeatureMatrix& embeddings,
                                 const LabelVector& labels,
                                 std::int64_t sample_pairs, std::uint64_t seed);

// Trapezoidal area under a sorted ROC curve.
double roc_auc(const std::vector<RocPoint>& points);

void save_roc_tsv(const std::vector<RocPoint>& points, const std::string& path);

}  // namespace adanets
