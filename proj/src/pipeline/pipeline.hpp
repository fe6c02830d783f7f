#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "metrics/metrics.hpp"

namespace adanets {

struct StageManifest {
  std::string stage;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

// Known stages in pipeline order:
//   synth knn rerank train-filter discover build-graph train-gcn embed
//   cluster eval
// Every stage reads its inputs from files produced by the previous stage
// under out_dir and writes its outputs atomically (temp file + rename),
// appending a manifest line to out_dir/manifest.jsonl.
StageManifest run_stage(const std::string& name, const PipelineConfig& config,
                        const std::string& out_dir);

// Full pipeline; with rounds = 2 the first round's embeddings become the
// second round's features (under out_dir/round2) and the linking threshold
// switches to the second-round default. Returns the final report.
MetricsReport run_pipeline(const PipelineConfig& config,
                           const std::string& out_dir, int rounds);

}  // namespace adanets
