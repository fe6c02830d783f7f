#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "discovery/filter_net.hpp"
#include "discovery/quality.hpp"

namespace adanets {

// Trained adaptive filter plus the k it was trained for.
struct FilterModel {
  FilterNet<float> net;
  int k = 0;
};

struct EpochLoss {
  int epoch = 0;
  double loss = 0.0;
};

// SGD with momentum 0.9, weight decay 1e-5 and cosine-annealed learning
// rate, seeded and deterministic. Aborts on NaN loss.
FilterModel train_filter(const std::vector<TrainingSequence>& sequences,
                         const PipelineConfig& config,
                         std::vector<EpochLoss>* log = nullptr);

// Rounded half-up, clamped to [1, k].
int predict_koff(const FilterModel& model, const MatrixXf& rows);

void save_filter(const FilterModel& model, const std::string& path);
FilterModel load_filter(const std::string& path);

}  // namespace adanets
