#include "core/feature_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace adanets {

namespace {

constexpr char kMagic[4] = {'A', 'N', 'F', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  // host is little-endian on every supported platform
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  return value;
}

}  // namespace

FeatureMatrix load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open feature file: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw_data("bad magic in feature file: " + path);
  auto version = read_le<std::uint32_t>(in);
  if (version != kVersion)
    throw_data("unsupported feature file version " + std::to_string(version));
  auto n = read_le<std::uint64_t>(in);
  auto d = read_le<std::uint64_t>(in);
  if (!in) throw_data("truncated header in " + path);
  if (n < 1) throw_data("n >= 1 violated in " + path);
  if (d < 1) throw_data("d >= 1 violated in " + path);

  FeatureMatrix m;
  m.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  in.read(reinterpret_cast<char*>(m.data.data()),
          static_cast<std::streamsize>(n * d * sizeof(float)));
  if (static_cast<std::uint64_t>(in.gcount()) != n * d * sizeof(float))
    throw_data("truncated payload in " + path);
  m.normalize_rows();
  return m;
}

void save_features(const FeatureMatrix& m, const std::string& path) {
  m.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  out.write(kMagic, 4);
  write_le(out, kVersion);
  write_le(out, static_cast<std::uint64_t>(m.n()));
  write_le(out, static_cast<std::uint64_t>(m.d()));
  out.write(reinterpret_cast<const char*>(m.data.data()),
            static_cast<std::streamsize>(m.n() * m.d() * sizeof(float)));
  if (!out) throw_data("write failed: " + path);
}

LabelVector load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open label file: " + path);
  LabelVector out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::int64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw_data("non-integer label at " + path + ":" + std::to_string(lineno));
    if (value < 0)
      throw_data("negative label at " + path + ":" + std::to_string(lineno));
    out.labels.push_back(static_cast<std::int32_t>(value));
  }
  if (out.labels.empty()) throw_data("empty label file: " + path);
  out.canonicalize();
  return out;
}

void save_labels(const LabelVector& labels, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  for (std::int32_t l : labels.labels) out << l << '\n';
  if (!out) throw_data("write failed: " + path);
}

}  // namespace adanets
