#include "gcn/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace adanets {

GcnModel train_gcn(const AdjacencyGraph& graph, const FeatureMatrix& features,
                   const LabelVector& labels, const PipelineConfig& config,
                   std::vector<GcnEpochLoss>* log) {
  if (labels.size() != features.n())
    throw_usage("train_gcn: label/feature count mismatch");
  if (graph.n != features.n())
    throw_usage("train_gcn: graph/feature count mismatch");

  GcnModel model;
  model.net = GcnNet<float>::init(static_cast<int>(features.d()),
                                  config.gcn_hidden, config.embed_dim,
                                  config.seed ^ 0x6c9ULL);
  if (config.gcn_epochs == 0) return model;

  auto params = model.net.params();
  nn::SgdMomentum<float> opt(params, config.momentum, config.weight_decay);

  Rng shuffle_rng(config.seed ^ 0x9c1e5ULL);
  std::vector<std::int32_t> order(static_cast<std::size_t>(graph.n));
  std::iota(order.begin(), order.end(), 0);

  nn::Mat<float> x = features.data;
  std::vector<nn::Mat<float>> grads;

  for (int epoch = 0; epoch < config.gcn_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = shuffle_rng.uniform_int(i);
      std::swap(order[i - 1], order[j]);
    }
    double lr = nn::cosine_lr(config.gcn_lr, epoch, config.gcn_epochs);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.gcn_batch)) {
      std::size_t stop = std::min(order.size(),
                                  start + static_cast<std::size_t>(config.gcn_batch));
      std::vector<std::int32_t> batch(order.begin() + start, order.begin() + stop);
      double loss = model.net.loss_and_grads(graph, x, labels.labels, batch,
                                             config.beta1, config.beta2,
                                             config.lambda, &grads);
      if (!std::isfinite(loss))
        throw_numeric("train_gcn: NaN/Inf loss at epoch " +
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

EmbeddingMatrix gcn_embed(const GcnModel& model, const AdjacencyGraph& graph,
                          const FeatureMatrix& features) {
  GcnNet<float>::Cache cache;
  nn::Mat<float> x = features.data;
  EmbeddingMatrix out;
  out.data = model.net.forward(graph, x, cache);
  out.normalize_rows();
  return out;
}

void save_gcn(const GcnModel& model, const std::string& path) {
  Checkpoint ckpt;
  ckpt.section = "gcn";
  ckpt.metadata = nlohmann::json{{"input_dim", model.net.input_dim},
                                 {"hidden", model.net.hidden},
                                 {"embed_dim", model.net.embed_dim}}
                      .dump();
  const char* names[] = {"w0", "w1", "wh", "prelu_a"};
  auto params = const_cast<GcnModel&>(model).net.params();
  for (std::size_t i = 0; i < params.size(); ++i)
    ckpt.tensors.emplace_back(names[i], *params[i]);
  save_checkpoint(ckpt, path);
}

GcnModel load_gcn(const std::string& path) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.section != "gcn")
    throw_data("checkpoint is not a gcn model: " + path);
  auto meta = nlohmann::json::parse(ckpt.metadata);
  GcnModel model;
  model.net.input_dim = meta.at("input_dim").get<int>();
  model.net.hidden = meta.at("hidden").get<int>();
  model.net.embed_dim = meta.at("embed_dim").get<int>();
  const char* names[] = {"w0", "w1", "wh", "prelu_a"};
  auto params = model.net.params();
  for (std::size_t i = 0; i < params.size(); ++i)
    *params[i] = ckpt.tensor(names[i]);
  return model;
}

}  // namespace adanets
