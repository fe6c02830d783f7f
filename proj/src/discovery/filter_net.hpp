#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/nn.hpp"

namespace adanets {

// Sequence regressor for the truncation point: a bidirectional LSTM over the
// (k+1) feature rows (probe first), followed by two affine layers with
// additive shortcuts and a scalar head. The raw head output is squashed
// through a sigmoid and scaled by k, so the network regresses the relative
// truncation point. Templated so gradient tests can run in 64-bit.
template <typename Scalar>
class FilterNet {
 public:
  using Mat = nn::Mat<Scalar>;

  int input_dim = 0;
  int hidden = 0;

  // per-direction LSTM parameters, gate order [i f g o] in column blocks
  Mat Wx[2], Wh[2], b[2];
  // head: two shortcut layers on the 2H encoding, then a scalar output
  Mat W1, b1, W2, b2, w3, b3;

  static FilterNet init(int input_dim, int hidden, std::uint64_t seed) {
    FilterNet net;
    net.input_dim = input_dim;
    net.hidden = hidden;
    Rng rng(seed);
    for (int d = 0; d < 2; ++d) {
      net.Wx[d] = nn::uniform_init<Scalar>(input_dim, 4 * hidden, input_dim, rng);
      net.Wh[d] = nn::uniform_init<Scalar>(hidden, 4 * hidden, hidden, rng);
      net.b[d] = Mat::Zero(1, 4 * hidden);
    }
    int h2 = 2 * hidden;
    net.W1 = nn::uniform_init<Scalar>(h2, h2, h2, rng);
    net.b1 = Mat::Zero(1, h2);
    net.W2 = nn::uniform_init<Scalar>(h2, h2, h2, rng);
    net.b2 = Mat::Zero(1, h2);
    net.w3 = nn::uniform_init<Scalar>(h2, 1, h2, rng);
    net.b3 = Mat::Zero(1, 1);
    return net;
  }

  std::vector<Mat*> params() {
    return {&Wx[0], &Wh[0], &b[0], &Wx[1], &Wh[1], &b[1],
            &W1,    &b1,    &W2,   &b2,    &w3,    &b3};
  }

  struct Cache {
    // per direction, per processed step
    std::vector<Mat> gi[2], gf[2], gg[2], go[2], c[2], tanh_c[2], h[2];
    std::vector<Mat> x;  // B x D per sequence step
    Mat enc, pre1, a1, pre2, a2, raw, yhat;
  };

  // steps: one B x D matrix per sequence position, shared by the batch.
  Mat encode(const std::vector<Mat>& steps, Cache& cache) const {
    const std::size_t L = steps.size();
    const Eigen::Index B = steps[0].rows();
    cache.x = steps;
    for (int d = 0; d < 2; ++d) {
      cache.gi[d].resize(L);
      cache.gf[d].resize(L);
      cache.gg[d].resize(L);
      cache.go[d].resize(L);
      cache.c[d].resize(L);
      cache.tanh_c[d].resize(L);
      cache.h[d].resize(L);
      Mat h_prev = Mat::Zero(B, hidden);
      Mat c_prev = Mat::Zero(B, hidden);
      for (std::size_t s = 0; s < L; ++s) {
        const Mat& x_t = steps[d == 0 ? s : L - 1 - s];
        Mat z = x_t * Wx[d] + h_prev * Wh[d];
        z.rowwise() += b[d].row(0);
        Mat gi = nn::sigmoid<Scalar>(z.leftCols(hidden));
        Mat gf = nn::sigmoid<Scalar>(z.middleCols(hidden, hidden));
        Mat gg = z.middleCols(2 * hidden, hidden).array().tanh().matrix();
        Mat go = nn::sigmoid<Scalar>(z.rightCols(hidden));
        Mat c_t = (gf.array() * c_prev.array() + gi.array() * gg.array()).matrix();
        Mat tc = c_t.array().tanh().matrix();
        Mat h_t = (go.array() * tc.array()).matrix();
        cache.gi[d][s] = std::move(gi);
        cache.gf[d][s] = std::move(gf);
        cache.gg[d][s] = std::move(gg);
        cache.go[d][s] = std::move(go);
        cache.c[d][s] = c_t;
        cache.tanh_c[d][s] = std::move(tc);
        cache.h[d][s] = h_t;
        h_prev = std::move(h_t);
        c_prev = std::move(c_t);
      }
    }
    Mat enc(B, 2 * hidden);
    enc.leftCols(hidden) = cache.h[0].back();
    enc.rightCols(hidden) = cache.h[1].back();
    cache.enc = enc;
    return enc;
  }

  // Raw scalar head output per batch row.
  Mat forward(const std::vector<Mat>& steps, Cache& cache) const {
    Mat enc = encode(steps, cache);
    cache.pre1 = enc * W1;
    cache.pre1.rowwise() += b1.row(0);
    cache.a1 = cache.pre1.cwiseMax(Scalar(0)) + enc;
    cache.pre2 = cache.a1 * W2;
    cache.pre2.rowwise() += b2.row(0);
    cache.a2 = cache.pre2.cwiseMax(Scalar(0)) + cache.a1;
    cache.raw = cache.a2 * w3;
    cache.raw.array() += b3(0, 0);
    cache.yhat = nn::sigmoid<Scalar>(cache.raw);
    return cache.raw;
  }

  // Continuous prediction sigmoid(raw) * k for a single sequence.
  double predict_continuous(const Mat& rows, int k) const {
    if (rows.cols() != input_dim)
      throw_usage("filter predict: feature dimension mismatch");
    std::vector<Mat> steps(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index t = 0; t < rows.rows(); ++t) steps[static_cast<std::size_t>(t)] = rows.row(t);
    Cache cache;
    forward(steps, cache);
    return static_cast<double>(cache.yhat(0, 0)) * k;
  }

  // Mean Huber loss over the batch and analytic gradients in params() order.
  double loss_and_grads(const std::vector<Mat>& steps,
                        const std::vector<int>& targets, int k, double delta,
                        std::vector<Mat>* grads_out) const {
    const Eigen::Index B = steps[0].rows();
    Cache cache;
    forward(steps, cache);

    double loss = 0.0;
    Mat draw = Mat::Zero(B, 1);
    for (Eigen::Index bi = 0; bi < B; ++bi) {
      double t = static_cast<double>(targets[static_cast<std::size_t>(bi)]);
      double khat = static_cast<double>(cache.yhat(bi, 0)) * k;
      double xi = std::abs(khat - t) / t;
      loss += xi < delta ? 0.5 * xi * xi : delta * xi - 0.5 * delta * delta;
      if (grads_out != nullptr) {
        double dxi = xi < delta ? xi : delta;
        double sign = khat > t ? 1.0 : (khat < t ? -1.0 : 0.0);
        double y = static_cast<double>(cache.yhat(bi, 0));
        draw(bi, 0) = static_cast<Scalar>(dxi * sign / t * k * y * (1.0 - y) /
                                          static_cast<double>(B));
      }
    }
    loss /= static_cast<double>(B);
    if (grads_out == nullptr) return loss;

    std::vector<Mat>& g = *grads_out;
    g.assign(12, Mat());

    // head
    g[10] = cache.a2.transpose() * draw;                       // w3
    g[11] = Mat::Constant(1, 1, draw.sum());                   // b3
    Mat da2 = draw * w3.transpose();
    Mat dpre2 =
        (da2.array() * (cache.pre2.array() > Scalar(0)).template cast<Scalar>())
            .matrix();
    g[8] = cache.a1.transpose() * dpre2;                       // W2
    g[9] = dpre2.colwise().sum();                              // b2
    Mat da1 = dpre2 * W2.transpose() + da2;
    Mat dpre1 =
        (da1.array() * (cache.pre1.array() > Scalar(0)).template cast<Scalar>())
            .matrix();
    g[6] = cache.enc.transpose() * dpre1;                      // W1
    g[7] = dpre1.colwise().sum();                              // b1
    Mat denc = dpre1 * W1.transpose() + da1;

    const std::size_t L = steps.size();
    for (int d = 0; d < 2; ++d) {
      Mat dWx = Mat::Zero(input_dim, 4 * hidden);
      Mat dWh = Mat::Zero(hidden, 4 * hidden);
      Mat db = Mat::Zero(1, 4 * hidden);
      Mat dh_next =
          d == 0 ? denc.leftCols(hidden).eval() : denc.rightCols(hidden).eval();
      Mat dc_next = Mat::Zero(B, hidden);
      for (std::size_t s = L; s-- > 0;) {
        const Mat& gi = cache.gi[d][s];
        const Mat& gf = cache.gf[d][s];
        const Mat& gg = cache.gg[d][s];
        const Mat& go = cache.go[d][s];
        const Mat& tc = cache.tanh_c[d][s];
        Mat c_prev = s > 0 ? cache.c[d][s - 1] : Mat::Zero(B, hidden);
        Mat h_prev = s > 0 ? cache.h[d][s - 1] : Mat::Zero(B, hidden);

        const Mat& dh = dh_next;
        Mat dgo = (dh.array() * tc.array()).matrix();
        Mat dc = ((dh.array() * go.array()) * (1 - tc.array().square())).matrix() +
                 dc_next;
        Mat dgf = (dc.array() * c_prev.array()).matrix();
        Mat dgi = (dc.array() * gg.array()).matrix();
        Mat dgg = (dc.array() * gi.array()).matrix();
        dc_next = (dc.array() * gf.array()).matrix();

        Mat dz(B, 4 * hidden);
        dz.leftCols(hidden) =
            (dgi.array() * gi.array() * (1 - gi.array())).matrix();
        dz.middleCols(hidden, hidden) =
            (dgf.array() * gf.array() * (1 - gf.array())).matrix();
        dz.middleCols(2 * hidden, hidden) =
            (dgg.array() * (1 - gg.array().square())).matrix();
        dz.rightCols(hidden) =
            (dgo.array() * go.array() * (1 - go.array())).matrix();

        const Mat& x_t = cache.x[d == 0 ? s : L - 1 - s];
        dWx += x_t.transpose() * dz;
        dWh += h_prev.transpose() * dz;
        db += dz.colwise().sum();
        dh_next = dz * Wh[d].transpose();
      }
      g[static_cast<std::size_t>(3 * d) + 0] = std::move(dWx);
      g[static_cast<std::size_t>(3 * d) + 1] = std::move(dWh);
      g[static_cast<std::size_t>(3 * d) + 2] = std::move(db);
    }
    return loss;
  }
};

}  // namespace adanets
