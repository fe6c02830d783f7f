#pragma once

#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/nn.hpp"
#include "graph/graph.hpp"

namespace adanets {

// Row-normalized mean aggregation over the closed neighbourhood:
// (A + I) rows averaged by degree + 1.
template <typename Scalar>
nn::Mat<Scalar> gcn_aggregate(const AdjacencyGraph& graph,
                              const nn::Mat<Scalar>& x) {
  if (x.rows() != graph.n) throw_usage("gcn_aggregate: row count mismatch");
  nn::Mat<Scalar> out(x.rows(), x.cols());
  for (std::int64_t v = 0; v < graph.n; ++v) {
    auto row = x.row(v).eval();
    for (std::int64_t e = graph.offsets[static_cast<std::size_t>(v)];
         e < graph.offsets[static_cast<std::size_t>(v) + 1]; ++e)
      row += x.row(graph.cols[static_cast<std::size_t>(e)]);
    out.row(v) = row / static_cast<Scalar>(graph.degree(v) + 1);
  }
  return out;
}

// Transpose of the aggregation operator: scale rows by 1/(degree+1), then
// sum over the closed neighbourhood (the adjacency itself is symmetric).
template <typename Scalar>
nn::Mat<Scalar> gcn_aggregate_transpose(const AdjacencyGraph& graph,
                                        const nn::Mat<Scalar>& x) {
  nn::Mat<Scalar> scaled(x.rows(), x.cols());
  for (std::int64_t v = 0; v < graph.n; ++v)
    scaled.row(v) = x.row(v) / static_cast<Scalar>(graph.degree(v) + 1);
  nn::Mat<Scalar> out = scaled;
  for (std::int64_t v = 0; v < graph.n; ++v)
    for (std::int64_t e = graph.offsets[static_cast<std::size_t>(v)];
         e < graph.offsets[static_cast<std::size_t>(v) + 1]; ++e)
      out.row(v) += scaled.row(graph.cols[static_cast<std::size_t>(e)]);
  return out;
}

// One graph convolution: sigma(mean-aggregate(F) * W), ReLU activation.
template <typename Scalar>
nn::Mat<Scalar> gcn_layer(const AdjacencyGraph& graph,
                          const nn::Mat<Scalar>& f, const nn::Mat<Scalar>& w) {
  if (f.cols() != w.rows()) throw_usage("gcn_layer: shape mismatch");
  return (gcn_aggregate(graph, f) * w).cwiseMax(Scalar(0));
}

struct HingeFlags {
  bool no_positive_pairs = false;
  bool no_negative_pairs = false;
};

// Variant hinge loss on a batch of unit embeddings: the positive term
// averages [beta1 - y]_+ over all same-label pairs, the negative term is the
// single hardest cross-label pair [beta2 + y]_+. y is the pair cosine.
// When d_embeddings is non-null, accumulates dL/dE for the batch rows.
template <typename Scalar>
double hinge_loss(const nn::Mat<Scalar>& embeddings,
                  const std::vector<std::int32_t>& labels, double beta1,
                  double beta2, double lambda,
                  nn::Mat<Scalar>* d_embeddings = nullptr,
                  HingeFlags* flags = nullptr) {
  const Eigen::Index B = embeddings.rows();
  if (static_cast<Eigen::Index>(labels.size()) != B)
    throw_usage("hinge_loss: label count mismatch");

  std::int64_t n_pos = 0;
  double pos_sum = 0.0;
  double neg_best = -1.0;
  Eigen::Index neg_i = -1, neg_j = -1;
  bool any_neg = false;

  for (Eigen::Index i = 0; i < B; ++i) {
    for (Eigen::Index j = i + 1; j < B; ++j) {
      double y = static_cast<double>(embeddings.row(i).dot(embeddings.row(j)));
      if (labels[static_cast<std::size_t>(i)] ==
          labels[static_cast<std::size_t>(j)]) {
        ++n_pos;
        pos_sum += std::max(0.0, beta1 - y);
      } else {
        any_neg = true;
        double v = std::max(0.0, beta2 + y);
        if (v > neg_best) {
          neg_best = v;
          neg_i = i;
          neg_j = j;
        }
      }
    }
  }

  double l_pos = n_pos > 0 ? pos_sum / static_cast<double>(n_pos) : 0.0;
  double l_neg = any_neg ? neg_best : 0.0;
  if (flags != nullptr) {
    flags->no_positive_pairs = n_pos == 0;
    flags->no_negative_pairs = !any_neg;
  }
  double loss = l_neg + lambda * l_pos;

  if (d_embeddings != nullptr) {
    nn::Mat<Scalar>& de = *d_embeddings;
    de = nn::Mat<Scalar>::Zero(B, embeddings.cols());
    if (n_pos > 0) {
      Scalar scale = static_cast<Scalar>(-lambda / static_cast<double>(n_pos));
      for (Eigen::Index i = 0; i < B; ++i) {
        for (Eigen::Index j = i + 1; j < B; ++j) {
          if (labels[static_cast<std::size_t>(i)] !=
              labels[static_cast<std::size_t>(j)])
            continue;
          double y =
              static_cast<double>(embeddings.row(i).dot(embeddings.row(j)));
          if (beta1 - y > 0.0) {
            de.row(i) += scale * embeddings.row(j);
            de.row(j) += scale * embeddings.row(i);
          }
        }
      }
    }
    if (any_neg && neg_best > 0.0) {
      de.row(neg_i) += embeddings.row(neg_j);
      de.row(neg_j) += embeddings.row(neg_i);
    }
  }
  return loss;
}

// Two graph convolutions, an affine head with PReLU, then row L2
// normalization. Templated so gradient checks can run in 64-bit.
template <typename Scalar>
class GcnNet {
 public:
  using Mat = nn::Mat<Scalar>;

  int input_dim = 0;
  int hidden = 0;
  int embed_dim = 0;

  // The head has no bias: before row normalization a shared offset cannot
  // encode per-vertex information, but its gradient (the column sum over all
  // active pairs) dwarfs the weight gradients and drags every normalized
  // embedding onto one direction within an epoch.
  Mat W0, W1, Wh;
  Mat prelu_a;  // 1x1 slope, shared

  static GcnNet init(int input_dim, int hidden, int embed_dim,
                     std::uint64_t seed) {
    GcnNet net;
    net.input_dim = input_dim;
    net.hidden = hidden;
    net.embed_dim = embed_dim;
    Rng rng(seed);
    net.W0 = nn::uniform_init<Scalar>(input_dim, hidden, input_dim, rng);
    net.W1 = nn::uniform_init<Scalar>(hidden, hidden, hidden, rng);
    net.Wh = nn::uniform_init<Scalar>(hidden, embed_dim, hidden, rng);
    net.prelu_a = Mat::Constant(1, 1, Scalar(0.25));
    return net;
  }

  std::vector<Mat*> params() { return {&W0, &W1, &Wh, &prelu_a}; }

  struct Cache {
    Mat x_agg, pre1, f1, f1_agg, pre2, f2, u, p;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> norms;
    Mat e;
  };

  // Whole-graph forward to unit-norm embeddings.
  Mat forward(const AdjacencyGraph& graph, const Mat& x, Cache& cache) const {
    if (x.cols() != input_dim) throw_usage("gcn forward: dimension mismatch");
    cache.x_agg = gcn_aggregate(graph, x);
    cache.pre1 = cache.x_agg * W0;
    cache.f1 = cache.pre1.cwiseMax(Scalar(0));
    cache.f1_agg = gcn_aggregate(graph, cache.f1);
    cache.pre2 = cache.f1_agg * W1;
    cache.f2 = cache.pre2.cwiseMax(Scalar(0));
    cache.u = cache.f2 * Wh;
    Scalar a = prelu_a(0, 0);
    cache.p = cache.u.unaryExpr(
        [a](Scalar v) { return v > Scalar(0) ? v : a * v; });
    cache.norms = cache.p.rowwise().norm();
    cache.e.resize(cache.p.rows(), cache.p.cols());
    for (Eigen::Index i = 0; i < cache.p.rows(); ++i) {
      Scalar norm = std::max(cache.norms(i), Scalar(1e-12));
      cache.e.row(i) = cache.p.row(i) / norm;
    }
    return cache.e;
  }

  // Hinge loss on a sampled vertex batch with gradients through the
  // whole-graph forward. Gradients returned in params() order.
  double loss_and_grads(const AdjacencyGraph& graph, const Mat& x,
                        const std::vector<std::int32_t>& all_labels,
                        const std::vector<std::int32_t>& batch, double beta1,
                        double beta2, double lambda, std::vector<Mat>* grads_out,
                        HingeFlags* flags = nullptr) const {
    Cache cache;
    forward(graph, x, cache);

    const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
    Mat batch_e(B, embed_dim);
    std::vector<std::int32_t> batch_labels(batch.size());
    for (Eigen::Index b = 0; b < B; ++b) {
      batch_e.row(b) = cache.e.row(batch[static_cast<std::size_t>(b)]);
      batch_labels[static_cast<std::size_t>(b)] =
          all_labels[static_cast<std::size_t>(batch[static_cast<std::size_t>(b)])];
    }

    Mat d_batch;
    double loss = hinge_loss<Scalar>(batch_e, batch_labels, beta1, beta2,
                                     lambda, grads_out ? &d_batch : nullptr,
                                     flags);
    if (grads_out == nullptr) return loss;

    Mat de = Mat::Zero(cache.e.rows(), cache.e.cols());
    for (Eigen::Index b = 0; b < B; ++b)
      de.row(batch[static_cast<std::size_t>(b)]) += d_batch.row(b);

    // normalization: dP = (dE - (dE . E) E) / ||P||
    Mat dp(de.rows(), de.cols());
    for (Eigen::Index i = 0; i < de.rows(); ++i) {
      Scalar norm = std::max(cache.norms(i), Scalar(1e-12));
      Scalar dot = de.row(i).dot(cache.e.row(i));
      dp.row(i) = (de.row(i) - dot * cache.e.row(i)) / norm;
    }

    Scalar a = prelu_a(0, 0);
    Mat du = (dp.array() *
              cache.u.unaryExpr([a](Scalar v) {
                       return v > Scalar(0) ? Scalar(1) : a;
                     }).array())
                 .matrix();
    Scalar da = (dp.array() *
                 cache.u.unaryExpr([](Scalar v) {
                          return v > Scalar(0) ? Scalar(0) : v;
                        }).array())
                    .sum();

    std::vector<Mat>& g = *grads_out;
    g.assign(4, Mat());
    g[2] = cache.f2.transpose() * du;     // Wh
    g[3] = Mat::Constant(1, 1, da);       // prelu slope
    Mat df2 = du * Wh.transpose();
    Mat dpre2 =
        (df2.array() * (cache.pre2.array() > Scalar(0)).template cast<Scalar>())
            .matrix();
    g[1] = cache.f1_agg.transpose() * dpre2;  // W1
    Mat df1_agg = dpre2 * W1.transpose();
    Mat df1 = gcn_aggregate_transpose(graph, df1_agg);
    Mat dpre1 =
        (df1.array() * (cache.pre1.array() > Scalar(0)).template cast<Scalar>())
            .matrix();
    g[0] = cache.x_agg.transpose() * dpre1;  // W0
    return loss;
  }
};

}  // namespace adanets
