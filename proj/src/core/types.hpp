#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/error.hpp"

namespace adanets {

using MatrixXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// N x D row-major feature vectors, every row unit L2 norm.
struct FeatureMatrix {
  MatrixXf data;

  std::int64_t n() const { return data.rows(); }
  std::int64_t d() const { return data.cols(); }

  // Re-normalizes every row to unit L2 norm. Rows of (near-)zero norm are a
  // data error, as are NaN/Inf entries.
  void normalize_rows();

  // Checks the invariants (n >= 1, d >= 1, finite, unit rows within 1e-4).
  void validate() const;
};

// Dense non-negative class ids, canonicalized to 0..C-1.
struct LabelVector {
  std::vector<std::int32_t> labels;

  std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
  std::int32_t num_classes() const;

  // Remaps raw ids to 0..C-1 in first-occurrence order.
  void canonicalize();
};

inline void FeatureMatrix::normalize_rows() {
  if (!data.allFinite()) throw_data("feature matrix contains NaN/Inf");
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    float norm = data.row(i).norm();
    if (norm < 1e-12f)
      throw_data("feature row " + std::to_string(i) + " has zero norm");
    data.row(i) /= norm;
  }
}

inline void FeatureMatrix::validate() const {
  if (n() < 1) throw_data("n >= 1 violated");
  if (d() < 1) throw_data("d >= 1 violated");
  if (!data.allFinite()) throw_data("feature matrix contains NaN/Inf");
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (std::abs(data.row(i).norm() - 1.0f) > 1e-4f)
      throw_data("feature row " + std::to_string(i) + " is not unit norm");
  }
}

inline std::int32_t LabelVector::num_classes() const {
  std::int32_t c = 0;
  for (std::int32_t l : labels) c = std::max(c, l + 1);
  return c;
}

inline void LabelVector::canonicalize() {
  std::vector<std::int32_t> remap;
  std::vector<std::int32_t> seen;  // raw id -> dense id, -1 when unseen
  for (std::int32_t& l : labels) {
    if (l < 0) throw_data("negative class id");
    if (static_cast<std::size_t>(l) >= seen.size())
      seen.resize(static_cast<std::size_t>(l) + 1, -1);
    if (seen[static_cast<std::size_t>(l)] < 0) {
      seen[static_cast<std::size_t>(l)] = static_cast<std::int32_t>(remap.size());
      remap.push_back(l);
    }
    l = seen[static_cast<std::size_t>(l)];
  }
}

}  // namespace adanets
