#include "discovery/quality.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace adanets {

std::pair<double, double> precision_recall_at(const StructureRanking& ranking,
                                              const LabelVector& labels,
                                              int j) {
  int k = static_cast<int>(ranking.ids.size());
  if (j < 1 || j > k) throw_usage("precision_recall_at: 1 <= j <= k violated");
  std::int32_t probe_label = labels.labels[static_cast<std::size_t>(ranking.probe)];
  std::int64_t class_total = 0;  // same-label samples excluding the probe
  for (std::size_t i = 0; i < labels.labels.size(); ++i)
    if (labels.labels[i] == probe_label &&
        static_cast<std::int32_t>(i) != ranking.probe)
      ++class_total;
  std::int64_t hits = 0;
  for (int r = 0; r < j; ++r)
    if (labels.labels[static_cast<std::size_t>(ranking.ids[r])] == probe_label)
      ++hits;
  double pr = static_cast<double>(hits) / j;
  double rc = class_total > 0
                  ? static_cast<double>(hits) / static_cast<double>(class_total)
                  : 0.0;
  return {pr, rc};
}

QualityCurve quality_curve(const StructureRanking& ranking,
                           const LabelVector& labels, double beta) {
  if (beta <= 0.0) throw_usage("quality_curve: beta > 0 violated");
  int k = static_cast<int>(ranking.ids.size());
  QualityCurve curve;
  curve.probe = ranking.probe;
  curve.precision.resize(static_cast<std::size_t>(k));
  curve.recall.resize(static_cast<std::size_t>(k));
  curve.q.resize(static_cast<std::size_t>(k));

  std::int32_t probe_label = labels.labels[static_cast<std::size_t>(ranking.probe)];
  std::int64_t class_total = 0;
  for (std::size_t i = 0; i < labels.labels.size(); ++i)
    if (labels.labels[i] == probe_label &&
        static_cast<std::int32_t>(i) != ranking.probe)
      ++class_total;
  curve.degenerate = class_total == 0;

  double b2 = beta * beta;
  std::int64_t hits = 0;
  for (int j = 1; j <= k; ++j) {
    if (labels.labels[static_cast<std::size_t>(ranking.ids[j - 1])] ==
        probe_label)
      ++hits;
    double pr = static_cast<double>(hits) / j;
    double rc = class_total > 0 ? static_cast<double>(hits) /
                                      static_cast<double>(class_total)
                                : 0.0;
    double denom = b2 * pr + rc;
    double q = denom > 0.0 ? (1.0 + b2) * pr * rc / denom : 0.0;
    curve.precision[static_cast<std::size_t>(j - 1)] = pr;
    curve.recall[static_cast<std::size_t>(j - 1)] = rc;
    curve.q[static_cast<std::size_t>(j - 1)] = q;
  }
  curve.koff = oracle_koff(curve);
  return curve;
}

int oracle_koff(const QualityCurve& curve) {
  if (curve.q.empty()) throw_usage("oracle_koff: empty curve");
  std::size_t best = 0;
  for (std::size_t j = 1; j < curve.q.size(); ++j)
    if (curve.q[j] > curve.q[best]) best = j;  // strict: smallest argmax wins
  return static_cast<int>(best) + 1;
}

double huber_loss(double k_hat, double k_off, double delta) {
  if (k_off < 1.0) throw_usage("huber_loss: k_off >= 1 violated");
  if (delta <= 0.0) throw_usage("huber_loss: delta > 0 violated");
  double xi = std::abs(k_hat - k_off) / k_off;
  if (xi < delta) return 0.5 * xi * xi;
  return delta * xi - 0.5 * delta * delta;
}

std::pair<std::vector<TrainingSequence>, std::size_t> build_training_sequences(
    const std::vector<StructureRanking>& rankings,
    const FeatureMatrix& features, const LabelVector& labels, double beta) {
  std::vector<TrainingSequence> out;
  out.reserve(rankings.size());
  std::size_t skipped = 0;
  for (const StructureRanking& ranking : rankings) {
    QualityCurve curve = quality_curve(ranking, labels, beta);
    if (curve.degenerate) {
      ++skipped;
      continue;
    }
    TrainingSequence seq;
    seq.probe = ranking.probe;
    seq.target = curve.koff;
    int k = static_cast<int>(ranking.ids.size());
    seq.rows.resize(k + 1, features.d());
    seq.rows.row(0) = features.data.row(ranking.probe);
    for (int r = 0; r < k; ++r)
      seq.rows.row(r + 1) = features.data.row(ranking.ids[static_cast<std::size_t>(r)]);
    out.push_back(std::move(seq));
  }
  return {std::move(out), skipped};
}

StructureRanking truncate_candidates(const StructureRanking& ranking,
                                     int k_hat) {
  int k = static_cast<int>(ranking.ids.size());
  if (k_hat < 1 || k_hat > k)
    throw_usage("truncate_candidates: 1 <= k_hat <= k violated");
  StructureRanking out;
  out.probe = ranking.probe;
  out.ids.assign(ranking.ids.begin(), ranking.ids.begin() + k_hat);
  out.kappas.assign(ranking.kappas.begin(), ranking.kappas.begin() + k_hat);
  out.original_sims.assign(ranking.original_sims.begin(),
                           ranking.original_sims.begin() + k_hat);
  return out;
}

}  // namespace adanets
