#pragma once

#include <cstdint>
#include <utility>

#include "core/types.hpp"

namespace adanets {

struct SyntheticSpec {
  int classes = 20;
  int per_class = 50;
  int dim = 64;
  double noise_sigma = 0.35;
  std::uint64_t seed = 1;

  void validate() const;
};

// Seeded hypersphere-blob generator: class centers uniform on the unit
// sphere, each sample = center + isotropic Gaussian(noise_sigma),
// re-normalized. Pure function of the spec.
std::pair<FeatureMatrix, LabelVector> generate_synthetic(
    const SyntheticSpec& spec);

}  // namespace adanets
