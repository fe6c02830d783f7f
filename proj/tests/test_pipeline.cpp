#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "pipeline/pipeline.hpp"
#include "test_util.hpp"

using namespace adanets;
namespace fs = std::filesystem;

namespace {

// A benchmark shrunk for unit-test speed.
PipelineConfig small_config() {
  PipelineConfig config;
  config.synth.classes = 6;
  config.synth.per_class = 20;
  config.synth.dim = 16;
  config.synth.noise_sigma = 0.2;
  config.k = 10;
  config.filter_epochs = 5;
  config.filter_hidden = 16;
  config.filter_batch = 16;
  config.gcn_epochs = 10;
  config.gcn_hidden = 16;
  config.gcn_batch = 64;
  config.embed_dim = 16;
  config.threads = 2;
  return config;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("stages chain, write their outputs, and append manifest lines") {
  testutil::TempDir dir("pipe");
  PipelineConfig config = small_config();

  StageManifest synth = run_stage("synth", config, dir.path().string());
  CHECK(synth.stage == "synth");
  CHECK(fs::exists(dir.path() / "test" / "features.anft"));
  CHECK(fs::exists(dir.path() / "train" / "labels.txt"));

  run_stage("knn", config, dir.path().string());
  CHECK(fs::exists(dir.path() / "test" / "knn.tsv"));
  run_stage("rerank", config, dir.path().string());
  run_stage("train-filter", config, dir.path().string());
  CHECK(fs::exists(dir.path() / "filter.anfm"));
  CHECK(fs::exists(dir.path() / "filter_log.jsonl"));
  run_stage("discover", config, dir.path().string());
  CHECK(fs::exists(dir.path() / "test" / "koff.tsv"));
  run_stage("build-graph", config, dir.path().string());
  run_stage("train-gcn", config, dir.path().string());
  run_stage("embed", config, dir.path().string());
  run_stage("cluster", config, dir.path().string());
  run_stage("eval", config, dir.path().string());
  CHECK(fs::exists(dir.path() / "report.json"));
  CHECK(fs::exists(dir.path() / "test" / "roc.tsv"));

  // one manifest line per executed stage, each parseable as JSON
  CHECK(count_lines(dir.path() / "manifest.jsonl") == 10);
  std::ifstream in(dir.path() / "manifest.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    CAPTURE(line);
    CHECK(line.front() == '{');
    CHECK(line.find("\"stage\"") != std::string::npos);
    CHECK(line.find("\"config_hash\"") != std::string::npos);
  }

  // the lock is released between stages
  CHECK(!fs::exists(dir.path() / ".lock"));
}

TEST_CASE("stage outputs are deterministic across reruns") {
  testutil::TempDir a("pipe-a"), b("pipe-b");
  PipelineConfig config = small_config();
  for (const char* stage : {"synth", "knn", "rerank"}) {
    run_stage(stage, config, a.path().string());
    run_stage(stage, config, b.path().string());
  }
  for (const char* rel : {"test/features.anft", "test/knn.tsv",
                          "test/rerank.tsv", "train/rerank.tsv"}) {
    CAPTURE(rel);
    CHECK(read_all(a.path() / rel) == read_all(b.path() / rel));
  }
}

TEST_CASE("missing stage inputs raise a data error") {
  testutil::TempDir dir("pipe-miss");
  PipelineConfig config = small_config();
  try {
    run_stage("knn", config, dir.path().string());
    FAIL("expected AdaError");
  } catch (const AdaError& e) {
    CHECK(e.exit_code() == 3);
  }
}

TEST_CASE("unknown stage names raise a usage error") {
  testutil::TempDir dir("pipe-bad");
  try {
    run_stage("fluxcapacitor", small_config(), dir.path().string());
    FAIL("expected AdaError");
  } catch (const AdaError& e) {
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("a held lock blocks a second run on the same directory") {
  testutil::TempDir dir("pipe-lock");
  fs::create_directories(dir.path());
  std::ofstream lock(dir.path() / ".lock");
  lock << "12345\n";
  lock.close();
  try {
    run_stage("synth", small_config(), dir.path().string());
    FAIL("expected AdaError");
  } catch (const AdaError& e) {
    CHECK(e.exit_code() == 2);
  }
  fs::remove(dir.path() / ".lock");
  CHECK_NOTHROW(run_stage("synth", small_config(), dir.path().string()));
}

TEST_CASE("full pipeline run and a second refinement round") {
  testutil::TempDir dir("pipe-full");
  PipelineConfig config = small_config();
  MetricsReport r1 = run_pipeline(config, dir.path().string(), 1);
  CHECK(r1.bcubed.f > 0.0);
  CHECK(r1.pairwise.f > 0.0);
  CHECK(fs::exists(dir.path() / "report.json"));

  testutil::TempDir dir2("pipe-two");
  MetricsReport r2 = run_pipeline(config, dir2.path().string(), 2);
  CHECK(fs::exists(dir2.path() / "round2" / "test" / "features.anft"));
  CHECK(fs::exists(dir2.path() / "round2" / "report.json"));
  CHECK(r2.bcubed.f > 0.0);

  CHECK_THROWS_AS(run_pipeline(config, dir.path().string(), 3), AdaError);
  PipelineConfig graphcut = config;
  graphcut.cluster_mode = "graphcut";
  CHECK_THROWS_AS(run_pipeline(graphcut, dir.path().string(), 2), AdaError);
}

TEST_CASE("evaluating a perfect clustering yields unit scores") {
  testutil::TempDir dir("pipe-clean");
  PipelineConfig config = small_config();
  config.synth.noise_sigma = 0.01;  // trivially separable
  MetricsReport r = run_pipeline(config, dir.path().string(), 1);
  CHECK(r.pairwise.f == doctest::Approx(1.0));
  CHECK(r.bcubed.f == doctest::Approx(1.0));
}
