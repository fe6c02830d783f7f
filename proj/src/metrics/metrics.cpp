#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace adanets {

namespace {

double harmonic(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

// cluster x class contingency counts, plus marginals
struct Contingency {
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> cells;
  std::vector<std::int64_t> cluster_sizes;
  std::vector<std::int64_t> class_sizes;
  std::int64_t n = 0;
};

Contingency contingency(const ClusterAssignment& pred,
                        const LabelVector& truth) {
  if (static_cast<std::int64_t>(pred.labels.size()) != truth.size())
    throw_usage("metrics: prediction/truth length mismatch");
  Contingency c;
  c.n = truth.size();
  c.cluster_sizes.assign(static_cast<std::size_t>(pred.num_clusters), 0);
  c.class_sizes.assign(static_cast<std::size_t>(truth.num_classes()), 0);
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    std::int32_t pc = pred.labels[i];
    std::int32_t tc = truth.labels[i];
    if (pc < 0 || static_cast<std::size_t>(pc) >= c.cluster_sizes.size())
      c.cluster_sizes.resize(static_cast<std::size_t>(pc) + 1, 0);
    ++c.cluster_sizes[static_cast<std::size_t>(pc)];
    ++c.class_sizes[static_cast<std::size_t>(tc)];
    ++c.cells[{pc, tc}];
  }
  return c;
}

std::int64_t pairs(std::int64_t m) { return m * (m - 1) / 2; }

}  // namespace

PrfTriple pairwise_f(const ClusterAssignment& pred, const LabelVector& truth) {
  Contingency c = contingency(pred, truth);
  std::int64_t tp = 0;
  for (const auto& [key, count] : c.cells) tp += pairs(count);
  std::int64_t pred_pos = 0;
  for (std::int64_t s : c.cluster_sizes) pred_pos += pairs(s);
  std::int64_t truth_pos = 0;
  for (std::int64_t s : c.class_sizes) truth_pos += pairs(s);

  PrfTriple out;
  if (pred_pos == 0) {
    out.precision = truth_pos == 0 ? 1.0 : 0.0;  // flagged degenerate case
  } else {
    out.precision = static_cast<double>(tp) / static_cast<double>(pred_pos);
  }
  out.recall = truth_pos > 0
                   ? static_cast<double>(tp) / static_cast<double>(truth_pos)
                   : 1.0;
  out.f = harmonic(out.precision, out.recall);
  return out;
}

PrfTriple bcubed_f(const ClusterAssignment& pred, const LabelVector& truth) {
  Contingency c = contingency(pred, truth);
  // item-averaged: every item in cell (pc,tc) contributes cell/|cluster| to
  // precision and cell/|class| to recall, so sum cell^2 / marginal.
  double p_sum = 0.0, r_sum = 0.0;
  for (const auto& [key, count] : c.cells) {
    double sq = static_cast<double>(count) * static_cast<double>(count);
    p_sum += sq / static_cast<double>(
                      c.cluster_sizes[static_cast<std::size_t>(key.first)]);
    r_sum += sq / static_cast<double>(
                      c.class_sizes[static_cast<std::size_t>(key.second)]);
  }
  PrfTriple out;
  out.precision = p_sum / static_cast<double>(c.n);
  out.recall = r_sum / static_cast<double>(c.n);
  out.f = harmonic(out.precision, out.recall);
  return out;
}

std::pair<double, double> q_summary(const std::vector<QualityCurve>& curves,
                                    const std::vector<int>& truncation) {
  if (curves.empty()) throw_usage("q_summary: no curves");
  if (curves.size() != truncation.size())
    throw_usage("q_summary: truncation count mismatch");
  double before = 0.0, after = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const QualityCurve& curve = curves[i];
    int t = truncation[i];
    if (t < 1 || t > static_cast<int>(curve.q.size()))
      throw_usage("q_summary: truncation out of range");
    before += curve.q.back();
    after += curve.q[static_cast<std::size_t>(t - 1)];
  }
  double inv = 1.0 / static_cast<double>(curves.size());
  return {before * inv, after * inv};
}

std::vector<RocPoint> roc_points(const FeatureMatrix& embeddings,
                                 const LabelVector& labels,
                                 std::int64_t sample_pairs,
                                 std::uint64_t seed) {
  if (sample_pairs < 1) throw_usage("roc_points: sample_pairs >= 1 violated");
  if (labels.num_classes() < 2)
    throw_usage("roc_points: degenerate single-class labels");
  std::int64_t n = embeddings.n();

  struct Scored {
    double sim;
    bool positive;
  };
  std::vector<Scored> scored;
  scored.reserve(static_cast<std::size_t>(sample_pairs));
  Rng rng(seed);
  while (static_cast<std::int64_t>(scored.size()) < sample_pairs) {
    auto i = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    auto j = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    if (i == j) continue;
    double sim =
        static_cast<double>(embeddings.data.row(i).dot(embeddings.data.row(j)));
    scored.push_back({sim, labels.labels[static_cast<std::size_t>(i)] ==
                               labels.labels[static_cast<std::size_t>(j)]});
  }

  std::int64_t total_pos = 0, total_neg = 0;
  for (const Scored& s : scored) (s.positive ? total_pos : total_neg)++;
  if (total_pos == 0 || total_neg == 0)
    throw_usage("roc_points: sample contains only one pair kind");

  std::sort(scored.begin(), scored.end(),
            [](const Scored& a, const Scored& b) { return a.sim > b.sim; });

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0});
  std::int64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].positive)
      ++tp;
    else
      ++fp;
    // emit a point after each block of equal similarities
    if (i + 1 == scored.size() || scored[i + 1].sim != scored[i].sim)
      points.push_back({static_cast<double>(fp) / static_cast<double>(total_neg),
                        static_cast<double>(tp) / static_cast<double>(total_pos)});
  }
  return points;
}

double roc_auc(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) *
            (points[i].tpr + points[i - 1].tpr) * 0.5;
  return area;
}

void save_roc_tsv(const std::vector<RocPoint>& points,
                  const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_data("cannot open for writing: " + path);
  char buf[96];
  for (const RocPoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\n", p.fpr, p.tpr);
    out << buf;
  }
  if (!out) throw_data("write failed: " + path);
}

std::string MetricsReport::to_json_text() const {
  nlohmann::json j{
      {"pairwise",
       {{"precision", pairwise.precision},
        {"recall", pairwise.recall},
        {"f", pairwise.f}}},
      {"bcubed",
       {{"precision", bcubed.precision},
        {"recall", bcubed.recall},
        {"f", bcubed.f}}},
      {"q_before", q_before},
      {"q_after", q_after},
  };
  if (std::isinf(snr))
    j["snr"] = "inf";
  else
    j["snr"] = snr;
  if (!roc.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const RocPoint& p : roc) arr.push_back({p.fpr, p.tpr});
    j["roc"] = arr;
  }
  return j.dump(2) + "\n";
}

MetricsReport MetricsReport::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_data(std::string("bad metrics JSON: ") + e.what());
  }
  MetricsReport r;
  r.pairwise.precision = j.at("pairwise").at("precision").get<double>();
  r.pairwise.recall = j.at("pairwise").at("recall").get<double>();
  r.pairwise.f = j.at("pairwise").at("f").get<double>();
  r.bcubed.precision = j.at("bcubed").at("precision").get<double>();
  r.bcubed.recall = j.at("bcubed").at("recall").get<double>();
  r.bcubed.f = j.at("bcubed").at("f").get<double>();
  if (j.at("snr").is_string())
    r.snr = std::numeric_limits<double>::infinity();
  else
    r.snr = j.at("snr").get<double>();
  r.q_before = j.at("q_before").get<double>();
  r.q_after = j.at("q_after").get<double>();
  if (j.contains("roc"))
    for (const auto& p : j.at("roc"))
      r.roc.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return r;
}

}  // namespace adanets
