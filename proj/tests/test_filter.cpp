#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "discovery/filter.hpp"
#include "test_util.hpp"

using namespace adanets;

namespace {

template <typename Scalar>
std::vector<nn::Mat<Scalar>> random_steps(int length, int batch, int dim,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<nn::Mat<Scalar>> steps(static_cast<std::size_t>(length));
  for (auto& s : steps) {
    s.resize(batch, dim);
    for (Eigen::Index i = 0; i < batch; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j)
        s(i, j) = static_cast<Scalar>(rng.normal());
      s.row(i) /= s.row(i).norm();
    }
  }
  return steps;
}

template <typename Scalar>
double max_rel_error(const FilterNet<Scalar>& net_in,
                     const std::vector<nn::Mat<Scalar>>& steps,
                     const std::vector<int>& targets, int k, Scalar eps) {
  FilterNet<Scalar> net = net_in;
  std::vector<nn::Mat<Scalar>> grads;
  net.loss_and_grads(steps, targets, k, 1.0, &grads);
  auto params = net.params();
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    nn::Mat<Scalar> num = nn::numeric_gradient<Scalar>(
        [&] { return net.loss_and_grads(steps, targets, k, 1.0, nullptr); },
        *params[p], eps);
    double denom = static_cast<double>(num.norm() + grads[p].norm());
    if (denom < 1e-12) continue;
    worst = std::max(worst,
                     static_cast<double>((grads[p] - num).norm()) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("filter gradients match finite differences in 64-bit") {
  auto net = FilterNet<double>::init(5, 4, 11);
  auto steps = random_steps<double>(6, 3, 5, 3);
  std::vector<int> targets = {2, 4, 5};
  CHECK(max_rel_error<double>(net, steps, targets, 5, 1e-6) < 1e-5);
}

TEST_CASE("filter gradients match finite differences in 32-bit") {
  // The reference differences are taken in 64-bit at the same parameter
  // values; pure 32-bit differencing drowns the smallest entries in
  // round-off noise.
  auto net = FilterNet<float>::init(5, 4, 11);
  auto steps = random_steps<float>(6, 3, 5, 3);
  std::vector<int> targets = {2, 4, 5};

  FilterNet<double> ref = FilterNet<double>::init(5, 4, 11);
  auto pf = net.params();
  auto pd = ref.params();
  for (std::size_t i = 0; i < pf.size(); ++i) *pd[i] = pf[i]->cast<double>();
  std::vector<nn::Mat<double>> steps_d(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i)
    steps_d[i] = steps[i].cast<double>();

  std::vector<nn::Mat<float>> grads;
  net.loss_and_grads(steps, targets, 5, 1.0, &grads);
  double worst = 0.0;
  for (std::size_t p = 0; p < pd.size(); ++p) {
    nn::Mat<double> num = nn::numeric_gradient<double>(
        [&] { return ref.loss_and_grads(steps_d, targets, 5, 1.0, nullptr); },
        *pd[p], 1e-6);
    double denom = num.norm() + static_cast<double>(grads[p].norm());
    if (denom < 1e-12) continue;
    worst = std::max(worst, (grads[p].cast<double>() - num).norm() / denom);
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("prediction scaling, rounding, and clamping") {
  FilterModel model;
  model.net = FilterNet<float>::init(4, 8, 3);
  model.k = 80;

  // bias the head so the sigmoid output is exactly 0.5
  model.net.w3.setZero();
  model.net.b3.setZero();
  MatrixXf rows = MatrixXf::Zero(81, 4);  // probe + k candidates
  rows.col(0).setOnes();
  CHECK(predict_koff(model, rows) == 40);  // 0.5 * 80 = 40

  // strongly negative raw output clamps to 1
  model.net.b3(0, 0) = -50.0f;
  CHECK(predict_koff(model, rows) == 1);
  // strongly positive raw output clamps to k
  model.net.b3(0, 0) = 50.0f;
  CHECK(predict_koff(model, rows) == 80);
}

TEST_CASE("rounding is half-up on the continuous prediction") {
  FilterModel model;
  model.net = FilterNet<float>::init(2, 4, 9);
  model.k = 10;
  model.net.w3.setZero();
  MatrixXf rows = MatrixXf::Zero(11, 2);
  rows.col(0).setOnes();
  // sigmoid(b3)*10 = 6.5 exactly at b3 = log(6.5/3.5)
  model.net.b3(0, 0) = std::log(6.5 / 3.5);
  CHECK(predict_koff(model, rows) == 7);
}

namespace {

std::vector<TrainingSequence> constant_target_data(int n, int k, int dim,
                                                   int target,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainingSequence> out;
  for (int i = 0; i < n; ++i) {
    TrainingSequence s;
    s.probe = i;
    s.rows.resize(k + 1, dim);
    for (Eigen::Index r = 0; r < s.rows.rows(); ++r) {
      for (Eigen::Index c = 0; c < dim; ++c)
        s.rows(r, c) = static_cast<float>(rng.normal());
      s.rows.row(r) /= s.rows.row(r).norm();
    }
    s.target = target;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("training is deterministic and zero epochs keep the init") {
  PipelineConfig config;
  config.k = 6;
  config.filter_hidden = 8;
  config.filter_epochs = 3;
  config.filter_batch = 4;
  config.seed = 5;
  auto data = constant_target_data(12, 6, 5, 4, 2);

  FilterModel a = train_filter(data, config);
  FilterModel b = train_filter(data, config);
  auto pa = a.net.params(), pb = b.net.params();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);

  config.filter_epochs = 0;
  FilterModel init = train_filter(data, config);
  FilterNet<float> fresh =
      FilterNet<float>::init(5, config.filter_hidden, config.seed);
  CHECK(init.net.Wx[0] == fresh.Wx[0]);
  CHECK(init.net.w3 == fresh.w3);
}

TEST_CASE("filter learns a constant target to within one position") {
  PipelineConfig config;
  config.k = 8;
  config.filter_hidden = 16;
  config.filter_epochs = 60;
  config.filter_batch = 8;
  config.seed = 3;
  auto data = constant_target_data(48, 8, 6, 5, 7);

  std::vector<EpochLoss> log;
  FilterModel model = train_filter(data, config, &log);
  CHECK(log.back().loss <= log.front().loss);

  double err = 0.0;
  for (const TrainingSequence& s : data)
    err += std::abs(predict_koff(model, s.rows) - s.target);
  CHECK(err / static_cast<double>(data.size()) < 1.0);
}

TEST_CASE("filter checkpoint round trip") {
  testutil::TempDir dir("filter");
  PipelineConfig config;
  config.k = 5;
  config.filter_hidden = 6;
  config.filter_epochs = 1;
  config.filter_batch = 4;
  auto data = constant_target_data(8, 5, 4, 3, 1);
  FilterModel model = train_filter(data, config);

  save_filter(model, dir.file("f.anfm"));
  FilterModel back = load_filter(dir.file("f.anfm"));
  CHECK(back.k == model.k);
  auto pa = model.net.params(), pb = back.net.params();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);

  // predictions identical after reload
  CHECK(predict_koff(back, data[0].rows) == predict_koff(model, data[0].rows));
  CHECK_THROWS_AS(load_filter(dir.file("missing.anfm")), AdaError);
}

TEST_CASE("training with empty data is a usage error") {
  PipelineConfig config;
  CHECK_THROWS_AS(train_filter({}, config), AdaError);
}
