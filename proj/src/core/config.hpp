#pragma once

#include <cstdint>
#include <string>

#include "core/synthetic.hpp"

namespace adanets {

// All pipeline knobs in one place. JSON keys mirror the field names; CLI
// flags override loaded values.
struct PipelineConfig {
  // candidate list size
  int k = 40;
  // structure-space mixing weight for the cosine term
  double eta = 0.5;
  // F-beta weight of the quality criterion
  double beta = 0.5;
  // Huber outlier threshold
  double delta = 1.0;
  // hinge-loss margins and positive weight
  double beta1 = 0.9;
  double beta2 = 1.0;
  double lambda = 1.0;
  // linking thresholds: first round, second (embedding) round, graph-cut
  double theta = 0.96;
  double theta_round2 = 0.99;
  double theta_graphcut = 0.5;
  // fixed-threshold baseline graph
  double tau = 0.60;

  double filter_lr = 0.01;
  double gcn_lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-5;
  int filter_epochs = 50;
  int filter_batch = 64;
  int filter_hidden = 64;
  int gcn_epochs = 100;
  int gcn_batch = 256;
  int gcn_hidden = 64;
  int embed_dim = 64;

  // fraction of random extra edges injected into the training graph
  double noise_rate = 0.0;

  std::string graph_mode = "adaptive";  // adaptive | knn | threshold
  std::string cluster_mode = "gcn";     // gcn | graphcut
  bool use_structure = true;

  int rounds = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 1;

  SyntheticSpec synth;

  void validate() const;

  // Canonical JSON round trip; unknown keys are rejected.
  static PipelineConfig from_json_text(const std::string& text);
  static PipelineConfig from_json_file(const std::string& path);
  std::string to_json_text() const;

  // Override a single field from its textual form ("eta=0.3" style values).
  void set_field(const std::string& key, const std::string& value);

  // FNV-1a over the canonical JSON dump; stable for a given build.
  std::uint64_t hash() const;
};

}  // namespace adanets
