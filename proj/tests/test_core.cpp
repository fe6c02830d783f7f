#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/feature_io.hpp"
#include "core/nn.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/synthetic.hpp"
#include "core/types.hpp"
#include "test_util.hpp"

using namespace adanets;

TEST_CASE("label canonicalization densifies in first-occurrence order") {
  LabelVector l{{7, 7, 3}};
  l.canonicalize();
  CHECK(l.labels == std::vector<std::int32_t>{0, 0, 1});
  LabelVector id{{0, 1, 2}};
  id.canonicalize();
  CHECK(id.labels == std::vector<std::int32_t>{0, 1, 2});
  CHECK(id.num_classes() == 3);
  LabelVector neg{{-1}};
  CHECK_THROWS_AS(neg.canonicalize(), AdaError);
}

TEST_CASE("feature normalization and validation") {
  FeatureMatrix m;
  m.data.resize(2, 3);
  m.data << 1, 0, 0, 0, 2, 0;
  m.normalize_rows();
  CHECK(m.data(1, 1) == doctest::Approx(1.0));
  m.validate();

  FeatureMatrix zero;
  zero.data = MatrixXf::Zero(1, 3);
  CHECK_THROWS_AS(zero.normalize_rows(), AdaError);

  FeatureMatrix nan;
  nan.data.resize(1, 2);
  nan.data << 1.0f, std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(nan.validate(), AdaError);
}

TEST_CASE("feature file round trip is bit exact") {
  testutil::TempDir dir("anft");
  FeatureMatrix m;
  m.data.resize(2, 3);
  m.data << 1, 0, 0, 0, 2, 0;
  m.normalize_rows();
  save_features(m, dir.file("f.anft"));
  FeatureMatrix back = load_features(dir.file("f.anft"));
  REQUIRE(back.n() == 2);
  REQUIRE(back.d() == 3);
  CHECK(back.data == m.data);  // bit-exact after normalization
  CHECK(back.data(1, 1) == 1.0f);
}

TEST_CASE("feature file size is fixed by the header layout") {
  // 4-byte magic + u32 version + u64 n + u64 d + one float32 = 28 bytes
  testutil::TempDir dir("anft");
  FeatureMatrix m;
  m.data = MatrixXf::Constant(1, 1, 1.0f);
  save_features(m, dir.file("one.anft"));
  CHECK(std::filesystem::file_size(dir.file("one.anft")) == 28);
}

TEST_CASE("feature loader rejects malformed files") {
  testutil::TempDir dir("anft");
  CHECK_THROWS_AS(load_features(dir.file("missing.anft")), AdaError);

  {
    std::ofstream out(dir.file("bad.anft"), std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_AS(load_features(dir.file("bad.anft")), AdaError);

  // valid header claiming n=0
  {
    std::ofstream out(dir.file("empty.anft"), std::ios::binary);
    out.write("ANFT", 4);
    std::uint32_t version = 1;
    std::uint64_t n = 0, d = 3;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&d), 8);
  }
  CHECK_THROWS_WITH_AS(load_features(dir.file("empty.anft")),
                       doctest::Contains("n >= 1"), AdaError);

  // truncated payload
  {
    std::ofstream out(dir.file("short.anft"), std::ios::binary);
    out.write("ANFT", 4);
    std::uint32_t version = 1;
    std::uint64_t n = 2, d = 2;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&d), 8);
    float v = 1.0f;
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  CHECK_THROWS_AS(load_features(dir.file("short.anft")), AdaError);
}

TEST_CASE("save_features to unwritable path raises a data error") {
  FeatureMatrix m;
  m.data = MatrixXf::Constant(1, 1, 1.0f);
  CHECK_THROWS_AS(save_features(m, "/nonexistent-dir/f.anft"), AdaError);
}

TEST_CASE("label file round trip and errors") {
  testutil::TempDir dir("labels");
  {
    std::ofstream out(dir.file("l.txt"));
    out << "7\n7\n3\n";
  }
  LabelVector l = load_labels(dir.file("l.txt"));
  CHECK(l.labels == std::vector<std::int32_t>{0, 0, 1});

  save_labels(l, dir.file("back.txt"));
  CHECK(load_labels(dir.file("back.txt")).labels == l.labels);

  {
    std::ofstream out(dir.file("empty.txt"));
  }
  CHECK_THROWS_AS(load_labels(dir.file("empty.txt")), AdaError);

  {
    std::ofstream out(dir.file("junk.txt"));
    out << "1\nbanana\n";
  }
  CHECK_THROWS_AS(load_labels(dir.file("junk.txt")), AdaError);
}

TEST_CASE("synthetic generator determinism and zero-noise geometry") {
  SyntheticSpec spec;
  spec.classes = 4;
  spec.per_class = 5;
  spec.dim = 8;
  spec.noise_sigma = 0.0;
  spec.seed = 11;

  auto [f1, l1] = generate_synthetic(spec);
  auto [f2, l2] = generate_synthetic(spec);
  CHECK(f1.data == f2.data);
  CHECK(l1.labels == l2.labels);

  // zero noise: within-class cosine exactly 1, cross-class strictly below
  for (int a = 0; a < f1.n(); ++a)
    for (int b = a + 1; b < f1.n(); ++b) {
      double cos = f1.data.row(a).dot(f1.data.row(b));
      if (l1.labels[a] == l1.labels[b])
        CHECK(cos == doctest::Approx(1.0).epsilon(1e-6));
      else
        CHECK(cos < 1.0 - 1e-6);
    }
}

TEST_CASE("synthetic benchmark lands in the pinned 1-NN purity band") {
  SyntheticSpec spec;  // defaults are the standard benchmark
  REQUIRE(spec.classes == 20);
  REQUIRE(spec.per_class == 50);
  REQUIRE(spec.dim == 64);
  REQUIRE(spec.noise_sigma == doctest::Approx(0.35));
  REQUIRE(spec.seed == 1);
  auto [f, l] = generate_synthetic(spec);

  // brute-force 1-NN oracle
  std::int64_t correct = 0;
  for (std::int64_t i = 0; i < f.n(); ++i) {
    double best = -2.0;
    std::int64_t arg = -1;
    for (std::int64_t j = 0; j < f.n(); ++j) {
      if (j == i) continue;
      double cos = f.data.row(i).dot(f.data.row(j));
      if (cos > best) {
        best = cos;
        arg = j;
      }
    }
    correct += l.labels[static_cast<std::size_t>(i)] ==
               l.labels[static_cast<std::size_t>(arg)];
  }
  double purity = static_cast<double>(correct) / static_cast<double>(f.n());
  CHECK(purity >= 0.80);
  CHECK(purity <= 0.95);
}

TEST_CASE("synthetic spec invariants") {
  SyntheticSpec spec;
  spec.classes = 0;
  CHECK_THROWS_AS(generate_synthetic(spec), AdaError);
  spec.classes = 1;
  spec.noise_sigma = -0.1;
  CHECK_THROWS_AS(generate_synthetic(spec), AdaError);
}

TEST_CASE("config json round trip, overrides, and hash") {
  PipelineConfig c;
  c.eta = 0.3;
  c.synth.classes = 7;
  std::string text = c.to_json_text();
  PipelineConfig back = PipelineConfig::from_json_text(text);
  CHECK(back.eta == doctest::Approx(0.3));
  CHECK(back.synth.classes == 7);
  CHECK(back.hash() == c.hash());

  back.set_field("eta", "0.4");
  CHECK(back.eta == doctest::Approx(0.4));
  CHECK(back.hash() != c.hash());
  back.set_field("synth.per_class", "9");
  CHECK(back.synth.per_class == 9);
  back.set_field("graph_mode", "knn");
  CHECK(back.graph_mode == "knn");

  CHECK_THROWS_AS(back.set_field("not_a_field", "1"), AdaError);
  CHECK_THROWS_AS(PipelineConfig::from_json_text("{\"bogus\": 1}"), AdaError);
  CHECK_THROWS_AS(PipelineConfig::from_json_text("not json"), AdaError);
}

TEST_CASE("config validation enforces the documented ranges") {
  PipelineConfig c;
  c.validate();
  c.eta = 1.5;
  CHECK_THROWS_AS(c.validate(), AdaError);
  c.eta = 0.5;
  c.beta = 0.0;
  CHECK_THROWS_AS(c.validate(), AdaError);
  c.beta = 0.5;
  c.theta = 1.0;
  CHECK_THROWS_AS(c.validate(), AdaError);
  c.theta = 0.96;
  c.k = 0;
  CHECK_THROWS_AS(c.validate(), AdaError);
  c.k = 40;
  c.graph_mode = "quantum";
  CHECK_THROWS_AS(c.validate(), AdaError);
}

TEST_CASE("rng streams are seed-deterministic") {
  Rng a(42), b(42), c(43);
  bool same = true, diff = false;
  for (int i = 0; i < 100; ++i) {
    double x = a.normal();
    same = same && x == b.normal();
    diff = diff || x != c.normal();
  }
  CHECK(same);
  CHECK(diff);
  Rng u(7);
  for (int i = 0; i < 1000; ++i) {
    double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("parallel_for output is independent of the thread count") {
  std::vector<std::int64_t> one(1000), four(1000);
  parallel_for(0, 1000, 1, [&](std::int64_t i) { one[i] = i * i; });
  parallel_for(0, 1000, 4, [&](std::int64_t i) { four[i] = i * i; });
  CHECK(one == four);
}

TEST_CASE("cosine annealing schedule endpoints") {
  CHECK(nn::cosine_lr(0.1, 0, 100) == doctest::Approx(0.1));
  CHECK(nn::cosine_lr(0.1, 50, 100) == doctest::Approx(0.05));
  CHECK(nn::cosine_lr(0.1, 100, 100) == doctest::Approx(0.0));
}

TEST_CASE("sgd momentum step matches the hand-computed update") {
  nn::Mat<double> p = nn::Mat<double>::Constant(1, 1, 1.0);
  nn::SgdMomentum<double> opt({&p}, 0.9, 0.0);
  nn::Mat<double> g = nn::Mat<double>::Constant(1, 1, 2.0);
  opt.step({g}, 0.1);   // v = -0.2; p = 0.8
  CHECK(p(0, 0) == doctest::Approx(0.8));
  opt.step({g}, 0.1);   // v = -0.18 - 0.2 = -0.38; p = 0.42
  CHECK(p(0, 0) == doctest::Approx(0.42));
}

TEST_CASE("numeric gradient matches analytic derivative of a quadratic") {
  nn::Mat<double> p(1, 2);
  p << 3.0, -2.0;
  auto loss = [&] { return p(0, 0) * p(0, 0) + 2.0 * p(0, 1) * p(0, 1); };
  nn::Mat<double> g = nn::numeric_gradient<double>(loss, p, 1e-6);
  CHECK(g(0, 0) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(g(0, 1) == doctest::Approx(-8.0).epsilon(1e-6));

  auto flat = [] { return 1.0; };
  nn::Mat<double> zero = nn::numeric_gradient<double>(flat, p, 1e-6);
  CHECK(zero.norm() == 0.0);
}

#include "core/checkpoint.hpp"

TEST_CASE("checkpoint container round trip") {
  testutil::TempDir dir("ckpt");
  Checkpoint c;
  c.section = "filter";
  c.metadata = "{\"k\": 3}";
  MatrixXf a(2, 2);
  a << 1, 2, 3, 4;
  c.tensors.emplace_back("a", a);
  c.tensors.emplace_back("b", MatrixXf::Zero(1, 5));
  save_checkpoint(c, dir.file("m.anfm"));

  Checkpoint back = load_checkpoint(dir.file("m.anfm"));
  CHECK(back.section == "filter");
  CHECK(back.metadata == c.metadata);
  CHECK(back.tensor("a") == a);
  CHECK(back.tensor("b").cols() == 5);
  CHECK_THROWS_AS(back.tensor("missing"), AdaError);
  CHECK_THROWS_AS(load_checkpoint(dir.file("absent.anfm")), AdaError);
}
