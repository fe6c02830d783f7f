#include "core/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "core/error.hpp"

namespace adanets {

namespace {

constexpr char kMagic[4] = {'A', 'N', 'F', 'M'};
constexpr std::uint32_t kVersion = 1;

void write_string(std::ostream& out, const std::string& s) {
  auto len = static_cast<std::uint32_t>(s.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const std::string& path) {
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len > (1u << 24)) throw_data("corrupt checkpoint: " + path);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw_data("truncated checkpoint: " + path);
  return s;
}

}  // namespace

const MatrixXf& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [tname, t] : tensors)
    if (tname == name) return t;
  throw_data("checkpoint tensor missing: " + name);
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  write_string(out, ckpt.section);
  write_string(out, ckpt.metadata);
  auto count = static_cast<std::uint64_t>(ckpt.tensors.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& [name, t] : ckpt.tensors) {
    write_string(out, name);
    auto rows = static_cast<std::uint64_t>(t.rows());
    auto cols = static_cast<std::uint64_t>(t.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(rows * cols * sizeof(float)));
  }
  if (!out) throw_data("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw_data("bad magic in checkpoint: " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion)
    throw_data("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.section = read_string(in, path);
  ckpt.metadata = read_string(in, path);
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || count > (1u << 20)) throw_data("corrupt checkpoint: " + path);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = read_string(in, path);
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in) throw_data("truncated checkpoint: " + path);
    MatrixXf t(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(float)));
    if (static_cast<std::uint64_t>(in.gcount()) != rows * cols * sizeof(float))
      throw_data("truncated checkpoint: " + path);
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

}  // namespace adanets
