#pragma once

#include <utility>
#include <vector>

#include "core/types.hpp"
#include "structspace/structspace.hpp"

namespace adanets {

// Per-probe F-beta quality of every candidate-list prefix.
struct QualityCurve {
  std::int32_t probe = 0;
  std::vector<double> precision;  // Pr^j, j = 1..k
  std::vector<double> recall;     // Rc^j
  std::vector<double> q;          // F-beta of the prefix
  int koff = 1;                   // 1-based smallest argmax of q
  bool degenerate = false;        // probe is its class's only member
};

// Precision/recall of the first j candidates against the probe's label.
// Recall denominator is the number of same-label samples excluding the
// probe; a singleton class yields Rc = 0 and the degenerate flag.
std::pair<double, double> precision_recall_at(const StructureRanking& ranking,
                                              const LabelVector& labels,
                                              int j);

QualityCurve quality_curve(const StructureRanking& ranking,
                           const LabelVector& labels, double beta);

// Smallest j attaining the maximum Q.
int oracle_koff(const QualityCurve& curve);

// Huber loss on the relative error xi = |k_hat - k_off| / k_off.
double huber_loss(double k_hat, double k_off, double delta);

// One training example for the adaptive filter: probe row first, then the
// kappa-ordered candidate rows.
struct TrainingSequence {
  std::int32_t probe = 0;
  MatrixXf rows;  // (k+1) x D
  int target = 1; // oracle k_off
};

// Builds one sequence per non-degenerate probe; returns the sequences and
// the count of skipped singleton-class probes.
std::pair<std::vector<TrainingSequence>, std::size_t> build_training_sequences(
    const std::vector<StructureRanking>& rankings,
    const FeatureMatrix& features, const LabelVector& labels, double beta);

// First k_hat entries, kappa order preserved.
StructureRanking truncate_candidates(const StructureRanking& ranking,
                                     int k_hat);

}  // namespace adanets
