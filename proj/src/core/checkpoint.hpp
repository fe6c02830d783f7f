#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"

namespace adanets {

// Versioned checkpoint container shared by the filter and GCN models:
//   magic "ANFM", u32 version = 1, tagged section name, JSON metadata
//   string, then a shape table of named float32 tensors (u64 rows, u64
//   cols, row-major payload). Little-endian throughout.
struct Checkpoint {
  std::string section;   // "filter" or "gcn"
  std::string metadata;  // JSON text with scalar hyperparameters
  std::vector<std::pair<std::string, MatrixXf>> tensors;

  const MatrixXf& tensor(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace adanets
