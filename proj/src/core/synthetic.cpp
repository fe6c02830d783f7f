#include "core/synthetic.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"

namespace adanets {

void SyntheticSpec::validate() const {
  if (classes < 1) throw_usage("synthetic spec: classes >= 1 violated");
  if (per_class < 1) throw_usage("synthetic spec: per_class >= 1 violated");
  if (dim < 1) throw_usage("synthetic spec: dim >= 1 violated");
  if (noise_sigma < 0.0) throw_usage("synthetic spec: noise_sigma >= 0 violated");
}

// Per-coordinate deviation for a given noise_sigma. The 0.625 calibration
// puts the sigma=0.35 reference benchmark at a mean 1-NN label purity of
// roughly 0.9; with the raw sigma the noise norm (sigma * sqrt(dim)) swamps
// the unit centers and every downstream quality ordering degenerates.
constexpr double kNoiseScale = 0.625;

std::pair<FeatureMatrix, LabelVector> generate_synthetic(
    const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const double coord_sigma = kNoiseScale * spec.noise_sigma;

  MatrixXd centers(spec.classes, spec.dim);
  for (int c = 0; c < spec.classes; ++c) {
    double norm = 0.0;
    do {
      for (int j = 0; j < spec.dim; ++j) centers(c, j) = rng.normal();
      norm = centers.row(c).norm();
    } while (norm < 1e-12);
    centers.row(c) /= norm;
  }

  FeatureMatrix features;
  features.data.resize(static_cast<Eigen::Index>(spec.classes) * spec.per_class,
                       spec.dim);
  LabelVector labels;
  labels.labels.reserve(features.data.rows());

  Eigen::RowVectorXd sample(spec.dim);
  Eigen::Index row = 0;
  for (int c = 0; c < spec.classes; ++c) {
    for (int s = 0; s < spec.per_class; ++s, ++row) {
      for (int j = 0; j < spec.dim; ++j)
        sample(j) = centers(c, j) + coord_sigma * rng.normal();
      double norm = sample.norm();
      if (norm < 1e-12) {
        // vanishingly unlikely; nudge back to the center
        sample = centers.row(c);
        norm = 1.0;
      }
      features.data.row(row) = (sample / norm).cast<float>();
      labels.labels.push_back(c);
    }
  }
  return {std::move(features), std::move(labels)};
}

}  // namespace adanets
