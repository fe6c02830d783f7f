#pragma once

#include <string>

#include "core/types.hpp"

namespace adanets {

// Binary feature file, little-endian:
//   magic "ANFT" (4 bytes), u32 version = 1, u64 n, u64 d,
//   then n*d float32 values row-major.
FeatureMatrix load_features(const std::string& path);
void save_features(const FeatureMatrix& m, const std::string& path);

// Label file: UTF-8 text, one integer per line, LF-terminated. Loading
// densifies raw ids to 0..C-1 in first-occurrence order.
LabelVector load_labels(const std::string& path);
void save_labels(const LabelVector& labels, const std::string& path);

}  // namespace adanets
