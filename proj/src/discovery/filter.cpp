#include "discovery/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace adanets {

FilterModel train_filter(const std::vector<TrainingSequence>& sequences,
                         const PipelineConfig& config,
                         std::vector<EpochLoss>* log) {
  if (sequences.empty()) throw_usage("train_filter: empty training set");
  const int D = static_cast<int>(sequences[0].rows.cols());
  const int L = static_cast<int>(sequences[0].rows.rows());
  const int k = L - 1;

  FilterModel model;
  model.k = k;
  model.net = FilterNet<float>::init(D, config.filter_hidden, config.seed);

  if (config.filter_epochs == 0) return model;

  auto params = model.net.params();
  nn::SgdMomentum<float> opt(params, config.momentum, config.weight_decay);

  Rng shuffle_rng(config.seed ^ 0x5eedf117ULL);
  std::vector<std::size_t> order(sequences.size());
  std::iota(order.begin(), order.end(), 0);

  const int B = config.filter_batch;
  std::vector<nn::Mat<float>> steps(static_cast<std::size_t>(L));
  std::vector<nn::Mat<float>> grads;
  std::vector<int> targets;

  for (int epoch = 0; epoch < config.filter_epochs; ++epoch) {
    // Fisher-Yates with the pipeline's own generator
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = shuffle_rng.uniform_int(i);
      std::swap(order[i - 1], order[j]);
    }
    double lr = nn::cosine_lr(config.filter_lr, epoch, config.filter_epochs);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += B) {
      std::size_t stop = std::min(order.size(), start + B);
      Eigen::Index bsz = static_cast<Eigen::Index>(stop - start);
      for (int t = 0; t < L; ++t) {
        steps[static_cast<std::size_t>(t)].resize(bsz, D);
        for (Eigen::Index b = 0; b < bsz; ++b)
          steps[static_cast<std::size_t>(t)].row(b) =
              sequences[order[start + static_cast<std::size_t>(b)]].rows.row(t);
      }
      targets.clear();
      for (std::size_t i = start; i < stop; ++i)
        targets.push_back(sequences[order[i]].target);
      double loss = model.net.loss_and_grads(steps, targets, k, config.delta,
                                             &grads);
      if (!std::isfinite(loss))
        throw_numeric("train_filter: NaN/Inf loss at epoch " +
                      std::to_string(epoch));
      opt.step(grads, lr);
      epoch_loss += loss;
      ++batches;
    }
    if (log != nullptr)
      log->push_back({epoch, epoch_loss / static_cast<double>(batches)});
  }
  return model;
}

int predict_koff(const FilterModel& model, const MatrixXf& rows) {
  if (rows.rows() != model.k + 1)
    throw_usage("predict_koff: expected k+1 feature rows");
  nn::Mat<float> input = rows;
  double khat = model.net.predict_continuous(input, model.k);
  int rounded = static_cast<int>(std::floor(khat + 0.5));  // half-up
  return std::clamp(rounded, 1, model.k);
}

void save_filter(const FilterModel& model, const std::string& path) {
  Checkpoint ckpt;
  ckpt.section = "filter";
  ckpt.metadata = nlohmann::json{{"input_dim", model.net.input_dim},
                                 {"hidden", model.net.hidden},
                                 {"k", model.k}}
                      .dump();
  const char* names[] = {"wx_fwd", "wh_fwd", "b_fwd", "wx_bwd", "wh_bwd",
                         "b_bwd",  "w1",     "b1",    "w2",     "b2",
                         "w3",     "b3"};
  auto params = const_cast<FilterModel&>(model).net.params();
  for (std::size_t i = 0; i < params.size(); ++i)
    ckpt.tensors.emplace_back(names[i], *params[i]);
  save_checkpoint(ckpt, path);
}

FilterModel load_filter(const std::string& path) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.section != "filter")
    throw_data("checkpoint is not a filter model: " + path);
  auto meta = nlohmann::json::parse(ckpt.metadata);
  FilterModel model;
  model.net.input_dim = meta.at("input_dim").get<int>();
  model.net.hidden = meta.at("hidden").get<int>();
  model.k = meta.at("k").get<int>();
  const char* names[] = {"wx_fwd", "wh_fwd", "b_fwd", "wx_bwd", "wh_bwd",
                         "b_bwd",  "w1",     "b1",    "w2",     "b2",
                         "w3",     "b3"};
  auto params = model.net.params();
  for (std::size_t i = 0; i < params.size(); ++i)
    *params[i] = ckpt.tensor(names[i]);
  return model;
}

}  // namespace adanets
