#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/types.hpp"
#include "gcn/gcn_net.hpp"

namespace adanets {

// GCN output rows are unit-norm feature vectors; they share the feature
// matrix representation (and file format).
using EmbeddingMatrix = FeatureMatrix;

struct GcnModel {
  GcnNet<float> net;
};

struct GcnEpochLoss {
  int epoch = 0;
  double loss = 0.0;
};

// Mini-batches of vertices sampled without replacement per epoch; SGD with
// momentum, weight decay and cosine-annealed learning rate. Deterministic
// given the seed; aborts on NaN loss.
GcnModel train_gcn(const AdjacencyGraph& graph, const FeatureMatrix& features,
                   const LabelVector& labels, const PipelineConfig& config,
                   std::vector<GcnEpochLoss>* log = nullptr);

// Whole-graph inference to unit-norm embeddings.
EmbeddingMatrix gcn_embed(const GcnModel& model, const AdjacencyGraph& graph,
                          const FeatureMatrix& features);

void save_gcn(const GcnModel& model, const std::string& path);
GcnModel load_gcn(const std::string& path);

}  // namespace adanets
