#include "pipeline/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <unistd.h>

#include <json.hpp>

#include "cluster/cluster.hpp"
#include "core/error.hpp"
#include "core/feature_io.hpp"
#include "core/synthetic.hpp"
#include "discovery/filter.hpp"
#include "discovery/quality.hpp"
#include "gcn/gcn.hpp"
#include "graph/graph.hpp"
#include "knn/knn.hpp"
#include "structspace/structspace.hpp"

namespace adanets {

namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kRocSamplePairs = 20000;

struct Paths {
  fs::path root;
  explicit Paths(fs::path out_dir) : root(std::move(out_dir)) {}

  fs::path split(const char* s) const { return root / s; }
  fs::path features(const char* s) const { return root / s / "features.anft"; }
  fs::path labels(const char* s) const { return root / s / "labels.txt"; }
  fs::path knn(const char* s) const { return root / s / "knn.tsv"; }
  fs::path rerank(const char* s) const { return root / s / "rerank.tsv"; }
  fs::path koff(const char* s) const { return root / s / "koff.tsv"; }
  fs::path graph(const char* s) const { return root / s / "graph.tsv"; }
  fs::path embeddings(const char* s) const {
    return root / s / "embeddings.anft";
  }
  fs::path clusters() const { return root / "test" / "clusters.txt"; }
  fs::path roc() const { return root / "test" / "roc.tsv"; }
  fs::path filter_model() const { return root / "filter.anfm"; }
  fs::path filter_log() const { return root / "filter_log.jsonl"; }
  fs::path gcn_model() const { return root / "gcn.anfm"; }
  fs::path gcn_log() const { return root / "gcn_log.jsonl"; }
  fs::path report() const { return root / "report.json"; }
  fs::path manifest() const { return root / "manifest.jsonl"; }
  fs::path lock() const { return root / ".lock"; }
};

// All stage outputs go through a temp file + rename so an interrupted run
// never leaves a partial file under its final name.
void atomic_write(const fs::path& path,
                  const std::function<void(const std::string&)>& writer) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  writer(tmp.string());
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw_data("rename failed for " + path.string() + ": " + ec.message());
}

class PipelineLock {
 public:
  explicit PipelineLock(const Paths& paths) : path_(paths.lock()) {
    fs::create_directories(path_.parent_path());
    FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr)
      throw_usage("another pipeline instance holds the lock: " +
                  path_.string());
    std::fprintf(f, "%ld\n", static_cast<long>(::getpid()));
    std::fclose(f);
  }
  ~PipelineLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  PipelineLock(const PipelineLock&) = delete;
  PipelineLock& operator=(const PipelineLock&) = delete;

 private:
  fs::path path_;
};

void require_input(const fs::path& p, const std::string& stage) {
  if (!fs::exists(p))
    throw_data("stage " + stage + ": missing input " + p.string());
}

void save_koff_tsv(const std::vector<int>& koff, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  for (std::size_t i = 0; i < koff.size(); ++i)
    out << i << '\t' << koff[i] << '\n';
  if (!out) throw_data("write failed: " + path);
}

std::vector<int> load_koff_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open koff file: " + path);
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long probe = 0, koff = 0;
    if (std::sscanf(line.c_str(), "%ld\t%ld", &probe, &koff) != 2)
      throw_data("bad koff line in " + path);
    if (probe != static_cast<long>(out.size()))
      throw_data("out-of-order probe in " + path);
    out.push_back(static_cast<int>(koff));
  }
  if (out.empty()) throw_data("empty koff file: " + path);
  return out;
}

template <typename LogEntry>
void save_training_log(const std::vector<LogEntry>& log,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  char buf[64];
  for (const LogEntry& e : log) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.loss);
    out << "{\"epoch\": " << e.epoch << ", \"loss\": " << buf << "}\n";
  }
}

double effective_eta(const PipelineConfig& config) {
  // eta = 1 degenerates kappa to the cosine, i.e. no structure space
  return config.use_structure ? config.eta : 1.0;
}

const char* kSplits[] = {"train", "test"};

// ---- stage bodies -------------------------------------------------------

void stage_synth(const PipelineConfig& config, const Paths& paths,
                 StageManifest& mf) {
  SyntheticSpec test_spec = config.synth;
  SyntheticSpec train_spec = config.synth;
  // disjoint training draw from a derived stream
  train_spec.seed = config.synth.seed + 1000003;

  for (const char* split : kSplits) {
    const SyntheticSpec& spec =
        std::string(split) == "train" ? train_spec : test_spec;
    auto [features, labels] = generate_synthetic(spec);
    atomic_write(paths.features(split), [&](const std::string& p) {
      save_features(features, p);
    });
    atomic_write(paths.labels(split), [&](const std::string& p) {
      save_labels(labels, p);
    });
    mf.outputs.push_back(paths.features(split).string());
    mf.outputs.push_back(paths.labels(split).string());
  }
}

void stage_knn(const PipelineConfig& config, const Paths& paths,
               StageManifest& mf) {
  for (const char* split : kSplits) {
    require_input(paths.features(split), "knn");
    FeatureMatrix features = load_features(paths.features(split).string());
    auto lists = build_knn(features, config.k, config.threads);
    atomic_write(paths.knn(split), [&](const std::string& p) {
      save_knn_tsv(lists, p);
    });
    mf.inputs.push_back(paths.features(split).string());
    mf.outputs.push_back(paths.knn(split).string());
  }
}

void stage_rerank(const PipelineConfig& config, const Paths& paths,
                  StageManifest& mf) {
  double eta = effective_eta(config);
  for (const char* split : kSplits) {
    require_input(paths.knn(split), "rerank");
    auto lists = load_knn_tsv(paths.knn(split).string());
    auto rankings = rerank_candidates(lists, eta, config.k, config.threads);
    atomic_write(paths.rerank(split), [&](const std::string& p) {
      save_rankings_tsv(rankings, p);
    });
    mf.inputs.push_back(paths.knn(split).string());
    mf.outputs.push_back(paths.rerank(split).string());
  }
}

void stage_train_filter(const PipelineConfig& config, const Paths& paths,
                        StageManifest& mf) {
  require_input(paths.rerank("train"), "train-filter");
  require_input(paths.features("train"), "train-filter");
  require_input(paths.labels("train"), "train-filter");
  FeatureMatrix features = load_features(paths.features("train").string());
  LabelVector labels = load_labels(paths.labels("train").string());
  auto rankings = load_rankings_tsv(paths.rerank("train").string());
  auto [sequences, skipped] =
      build_training_sequences(rankings, features, labels, config.beta);
  (void)skipped;
  std::vector<EpochLoss> log;
  FilterModel model = train_filter(sequences, config, &log);
  atomic_write(paths.filter_model(), [&](const std::string& p) {
    save_filter(model, p);
  });
  atomic_write(paths.filter_log(), [&](const std::string& p) {
    save_training_log(log, p);
  });
  mf.inputs.push_back(paths.rerank("train").string());
  mf.outputs.push_back(paths.filter_model().string());
  mf.outputs.push_back(paths.filter_log().string());
}

void stage_discover(const PipelineConfig& config, const Paths& paths,
                    StageManifest& mf) {
  for (const char* split : kSplits) {
    require_input(paths.rerank(split), "discover");
    auto rankings = load_rankings_tsv(paths.rerank(split).string());
    std::vector<int> koff(rankings.size(), config.k);
    if (config.graph_mode == "adaptive") {
      require_input(paths.filter_model(), "discover");
      require_input(paths.features(split), "discover");
      FeatureMatrix features = load_features(paths.features(split).string());
      FilterModel model = load_filter(paths.filter_model().string());
      MatrixXf rows(model.k + 1, features.d());
      for (std::size_t i = 0; i < rankings.size(); ++i) {
        const StructureRanking& r = rankings[i];
        rows.row(0) = features.data.row(r.probe);
        for (int c = 0; c < model.k; ++c)
          rows.row(c + 1) =
              features.data.row(r.ids[static_cast<std::size_t>(c)]);
        koff[i] = predict_koff(model, rows);
      }
      mf.inputs.push_back(paths.filter_model().string());
    }
    atomic_write(paths.koff(split), [&](const std::string& p) {
      save_koff_tsv(koff, p);
    });
    mf.inputs.push_back(paths.rerank(split).string());
    mf.outputs.push_back(paths.koff(split).string());
  }
}

void stage_build_graph(const PipelineConfig& config, const Paths& paths,
                       StageManifest& mf) {
  for (const char* split : kSplits) {
    AdjacencyGraph graph;
    if (config.graph_mode == "adaptive") {
      require_input(paths.rerank(split), "build-graph");
      require_input(paths.koff(split), "build-graph");
      auto rankings = load_rankings_tsv(paths.rerank(split).string());
      auto koff = load_koff_tsv(paths.koff(split).string());
      if (koff.size() != rankings.size())
        throw_data("build-graph: koff/ranking count mismatch");
      std::vector<StructureRanking> truncated;
      truncated.reserve(rankings.size());
      for (std::size_t i = 0; i < rankings.size(); ++i)
        truncated.push_back(truncate_candidates(rankings[i], koff[i]));
      graph = build_graph(truncated);
      mf.inputs.push_back(paths.rerank(split).string());
    } else if (config.graph_mode == "knn") {
      require_input(paths.knn(split), "build-graph");
      auto lists = load_knn_tsv(paths.knn(split).string());
      graph = knn_graph(lists, config.k);
      mf.inputs.push_back(paths.knn(split).string());
    } else {  // threshold
      require_input(paths.knn(split), "build-graph");
      auto lists = load_knn_tsv(paths.knn(split).string());
      graph = threshold_graph(lists, config.tau);
      mf.inputs.push_back(paths.knn(split).string());
    }
    if (std::string(split) == "train" && config.noise_rate > 0.0)
      graph = perturb_training_graph(graph, config.noise_rate,
                                     config.seed ^ 0x6e6f6973ULL);
    atomic_write(paths.graph(split), [&](const std::string& p) {
      save_graph_tsv(graph, p);
    });
    mf.outputs.push_back(paths.graph(split).string());
  }
}

void stage_train_gcn(const PipelineConfig& config, const Paths& paths,
                     StageManifest& mf) {
  require_input(paths.features("train"), "train-gcn");
  require_input(paths.labels("train"), "train-gcn");
  require_input(paths.graph("train"), "train-gcn");
  FeatureMatrix features = load_features(paths.features("train").string());
  LabelVector labels = load_labels(paths.labels("train").string());
  AdjacencyGraph graph =
      load_graph_tsv(paths.graph("train").string(), features.n());
  std::vector<GcnEpochLoss> log;
  GcnModel model = train_gcn(graph, features, labels, config, &log);
  atomic_write(paths.gcn_model(), [&](const std::string& p) {
    save_gcn(model, p);
  });
  atomic_write(paths.gcn_log(), [&](const std::string& p) {
    save_training_log(log, p);
  });
  mf.inputs.push_back(paths.graph("train").string());
  mf.outputs.push_back(paths.gcn_model().string());
  mf.outputs.push_back(paths.gcn_log().string());
}

void stage_embed(const PipelineConfig& config, const Paths& paths,
                 StageManifest& mf) {
  (void)config;
  require_input(paths.gcn_model(), "embed");
  GcnModel model = load_gcn(paths.gcn_model().string());
  for (const char* split : kSplits) {
    require_input(paths.features(split), "embed");
    require_input(paths.graph(split), "embed");
    FeatureMatrix features = load_features(paths.features(split).string());
    AdjacencyGraph graph =
        load_graph_tsv(paths.graph(split).string(), features.n());
    EmbeddingMatrix embeddings = gcn_embed(model, graph, features);
    atomic_write(paths.embeddings(split), [&](const std::string& p) {
      save_features(embeddings, p);
    });
    mf.inputs.push_back(paths.features(split).string());
    mf.outputs.push_back(paths.embeddings(split).string());
  }
}

void stage_cluster(const PipelineConfig& config, const Paths& paths,
                   StageManifest& mf) {
  ClusterAssignment clusters;
  if (config.cluster_mode == "gcn") {
    require_input(paths.embeddings("test"), "cluster");
    require_input(paths.graph("test"), "cluster");
    FeatureMatrix embeddings = load_features(paths.embeddings("test").string());
    AdjacencyGraph graph =
        load_graph_tsv(paths.graph("test").string(), embeddings.n());
    auto links = link_pairs(embeddings, graph, config.theta);
    clusters = union_find_merge(embeddings.n(), links);
    mf.inputs.push_back(paths.embeddings("test").string());
  } else {  // graphcut
    require_input(paths.graph("test"), "cluster");
    require_input(paths.features("test"), "cluster");
    FeatureMatrix features = load_features(paths.features("test").string());
    AdjacencyGraph graph =
        load_graph_tsv(paths.graph("test").string(), features.n());
    clusters = graph_cut_baseline(graph, config.theta_graphcut);
    mf.inputs.push_back(paths.graph("test").string());
  }
  atomic_write(paths.clusters(), [&](const std::string& p) {
    save_clusters(clusters, p);
  });
  mf.outputs.push_back(paths.clusters().string());
}

void stage_eval(const PipelineConfig& config, const Paths& paths,
                StageManifest& mf) {
  require_input(paths.clusters(), "eval");
  require_input(paths.labels("test"), "eval");
  ClusterAssignment clusters = load_clusters(paths.clusters().string());
  LabelVector labels = load_labels(paths.labels("test").string());

  MetricsReport report;
  report.pairwise = pairwise_f(clusters, labels);
  report.bcubed = bcubed_f(clusters, labels);

  if (fs::exists(paths.graph("test"))) {
    AdjacencyGraph graph =
        load_graph_tsv(paths.graph("test").string(), labels.size());
    report.snr = snr(graph, labels);
  }

  if (fs::exists(paths.rerank("test"))) {
    auto rankings = load_rankings_tsv(paths.rerank("test").string());
    std::vector<int> truncation(rankings.size(), config.k);
    if (fs::exists(paths.koff("test")))
      truncation = load_koff_tsv(paths.koff("test").string());
    std::vector<QualityCurve> curves;
    curves.reserve(rankings.size());
    for (const StructureRanking& r : rankings)
      curves.push_back(quality_curve(r, labels, config.beta));
    auto [before, after] = q_summary(curves, truncation);
    report.q_before = before;
    report.q_after = after;
  }

  if (fs::exists(paths.embeddings("test"))) {
    FeatureMatrix embeddings = load_features(paths.embeddings("test").string());
    auto roc = roc_points(embeddings, labels, kRocSamplePairs,
                          config.seed ^ 0x726f63ULL);
    atomic_write(paths.roc(), [&](const std::string& p) {
      save_roc_tsv(roc, p);
    });
    mf.outputs.push_back(paths.roc().string());
  }

  atomic_write(paths.report(), [&](const std::string& p) {
    std::ofstream out(p, std::ios::trunc);
    out << report.to_json_text();
    if (!out) throw_data("write failed: " + p);
  });
  mf.inputs.push_back(paths.clusters().string());
  mf.outputs.push_back(paths.report().string());
}

void append_manifest(const Paths& paths, const StageManifest& mf) {
  std::ofstream out(paths.manifest(), std::ios::app);
  if (!out) throw_data("cannot append manifest: " + paths.manifest().string());
  nlohmann::json j{{"stage", mf.stage},
                   {"inputs", mf.inputs},
                   {"outputs", mf.outputs},
                   {"config_hash", mf.config_hash},
                   {"seed", mf.seed},
                   {"wall_ms", mf.wall_ms}};
  out << j.dump() << "\n";
}

StageManifest run_stage_locked(const std::string& name,
                               const PipelineConfig& config,
                               const Paths& paths) {
  config.validate();
  StageManifest mf;
  mf.stage = name;
  mf.config_hash = config.hash();
  mf.seed = config.seed;

  auto start = std::chrono::steady_clock::now();
  if (name == "synth") {
    stage_synth(config, paths, mf);
  } else if (name == "knn") {
    stage_knn(config, paths, mf);
  } else if (name == "rerank") {
    stage_rerank(config, paths, mf);
  } else if (name == "train-filter") {
    stage_train_filter(config, paths, mf);
  } else if (name == "discover") {
    stage_discover(config, paths, mf);
  } else if (name == "build-graph") {
    stage_build_graph(config, paths, mf);
  } else if (name == "train-gcn") {
    stage_train_gcn(config, paths, mf);
  } else if (name == "embed") {
    stage_embed(config, paths, mf);
  } else if (name == "cluster") {
    stage_cluster(config, paths, mf);
  } else if (name == "eval") {
    stage_eval(config, paths, mf);
  } else {
    throw_usage("unknown stage: " + name);
  }
  mf.wall_ms = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  append_manifest(paths, mf);
  return mf;
}

std::vector<std::string> round_stages(const PipelineConfig& config,
                                      bool with_synth) {
  std::vector<std::string> stages;
  if (with_synth) stages.push_back("synth");
  stages.insert(stages.end(), {"knn", "rerank"});
  if (config.graph_mode == "adaptive") stages.push_back("train-filter");
  stages.insert(stages.end(), {"discover", "build-graph"});
  if (config.cluster_mode == "gcn")
    stages.insert(stages.end(), {"train-gcn", "embed"});
  stages.insert(stages.end(), {"cluster", "eval"});
  return stages;
}

MetricsReport load_report(const Paths& paths) {
  std::ifstream in(paths.report());
  if (!in) throw_data("missing report: " + paths.report().string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return MetricsReport::from_json_text(text);
}

}  // namespace

StageManifest run_stage(const std::string& name, const PipelineConfig& config,
                        const std::string& out_dir) {
  Paths paths(out_dir);
  fs::create_directories(paths.root);
  PipelineLock lock(paths);
  return run_stage_locked(name, config, paths);
}

MetricsReport run_pipeline(const PipelineConfig& config,
                           const std::string& out_dir, int rounds) {
  if (rounds != 1 && rounds != 2) throw_usage("run_pipeline: rounds in {1,2}");
  Paths paths(out_dir);
  fs::create_directories(paths.root);
  PipelineLock lock(paths);

  for (const std::string& stage : round_stages(config, /*with_synth=*/true))
    run_stage_locked(stage, config, paths);
  if (rounds == 1) return load_report(paths);

  if (config.cluster_mode != "gcn")
    throw_usage("run_pipeline: rounds=2 needs GCN embeddings");

  // round 2: the graph embeddings become the input features
  Paths round2(paths.root / "round2");
  fs::create_directories(round2.root);
  for (const char* split : kSplits) {
    fs::create_directories(round2.split(split));
    atomic_write(round2.features(split), [&](const std::string& p) {
      fs::copy_file(paths.embeddings(split), p,
                    fs::copy_options::overwrite_existing);
    });
    atomic_write(round2.labels(split), [&](const std::string& p) {
      fs::copy_file(paths.labels(split), p,
                    fs::copy_options::overwrite_existing);
    });
  }
  PipelineConfig second = config;
  second.theta = config.theta_round2;
  for (const std::string& stage : round_stages(second, /*with_synth=*/false))
    run_stage_locked(stage, second, round2);
  return load_report(round2);
}

}  // namespace adanets
