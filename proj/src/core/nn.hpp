#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "core/rng.hpp"

namespace adanets::nn {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Uniform init scaled by the incoming dimension.
template <typename Scalar>
Mat<Scalar> uniform_init(Eigen::Index rows, Eigen::Index cols,
                         Eigen::Index fan_in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Mat<Scalar> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = static_cast<Scalar>((2.0 * rng.uniform() - 1.0) * bound);
  return m;
}

template <typename Scalar>
Mat<Scalar> sigmoid(const Mat<Scalar>& x) {
  return x.unaryExpr([](Scalar v) {
    return static_cast<Scalar>(1.0 / (1.0 + std::exp(-static_cast<double>(v))));
  });
}

// lr schedule: cosine annealing from lr0 to 0 over `total` epochs.
inline double cosine_lr(double lr0, int epoch, int total) {
  if (total <= 0) return lr0;
  return lr0 * 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(epoch) /
                                     static_cast<double>(total)));
}

// SGD with momentum and decoupled-from-nothing classic weight decay:
// v = mu*v - lr*(g + wd*p); p += v.
template <typename Scalar>
class SgdMomentum {
 public:
  SgdMomentum(std::vector<Mat<Scalar>*> params, double momentum,
              double weight_decay)
      : params_(std::move(params)), momentum_(momentum), wd_(weight_decay) {
    velocity_.reserve(params_.size());
    for (Mat<Scalar>* p : params_)
      velocity_.push_back(Mat<Scalar>::Zero(p->rows(), p->cols()));
  }

  void step(const std::vector<Mat<Scalar>>& grads, double lr) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Mat<Scalar>& p = *params_[i];
      velocity_[i] = static_cast<Scalar>(momentum_) * velocity_[i] -
                     static_cast<Scalar>(lr) *
                         (grads[i] + static_cast<Scalar>(wd_) * p);
      p += velocity_[i];
    }
  }

 private:
  std::vector<Mat<Scalar>*> params_;
  std::vector<Mat<Scalar>> velocity_;
  double momentum_;
  double wd_;
};

// Central finite difference per coordinate of one parameter tensor. Test
// oracle; the loss closure must be a pure function of the current params.
template <typename Scalar, typename LossFn>
Mat<Scalar> numeric_gradient(LossFn&& loss, Mat<Scalar>& param, Scalar eps) {
  Mat<Scalar> grad(param.rows(), param.cols());
  for (Eigen::Index i = 0; i < param.rows(); ++i) {
    for (Eigen::Index j = 0; j < param.cols(); ++j) {
      Scalar saved = param(i, j);
      param(i, j) = saved + eps;
      double up = loss();
      param(i, j) = saved - eps;
      double down = loss();
      param(i, j) = saved;
      grad(i, j) = static_cast<Scalar>((up - down) / (2.0 * static_cast<double>(eps)));
    }
  }
  return grad;
}

}  // namespace adanets::nn
