#include "core/config.hpp"

#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace adanets {

using nlohmann::json;

namespace {

json to_json(const PipelineConfig& c) {
  return json{
      {"k", c.k},
      {"eta", c.eta},
      {"beta", c.beta},
      {"delta", c.delta},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"lambda", c.lambda},
      {"theta", c.theta},
      {"theta_round2", c.theta_round2},
      {"theta_graphcut", c.theta_graphcut},
      {"tau", c.tau},
      {"filter_lr", c.filter_lr},
      {"gcn_lr", c.gcn_lr},
      {"momentum", c.momentum},
      {"weight_decay", c.weight_decay},
      {"filter_epochs", c.filter_epochs},
      {"filter_batch", c.filter_batch},
      {"filter_hidden", c.filter_hidden},
      {"gcn_epochs", c.gcn_epochs},
      {"gcn_batch", c.gcn_batch},
      {"gcn_hidden", c.gcn_hidden},
      {"embed_dim", c.embed_dim},
      {"noise_rate", c.noise_rate},
      {"graph_mode", c.graph_mode},
      {"cluster_mode", c.cluster_mode},
      {"use_structure", c.use_structure},
      {"rounds", c.rounds},
      {"threads", c.threads},
      {"seed", c.seed},
      {"synth",
       json{{"classes", c.synth.classes},
            {"per_class", c.synth.per_class},
            {"dim", c.synth.dim},
            {"noise_sigma", c.synth.noise_sigma},
            {"seed", c.synth.seed}}},
  };
}

template <typename T>
void pick(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

PipelineConfig from_json(const json& j) {
  PipelineConfig c;
  if (!j.is_object()) throw_usage("config JSON must be an object");
  static const char* known[] = {
      "k",           "eta",          "beta",          "delta",
      "beta1",       "beta2",        "lambda",        "theta",
      "theta_round2", "theta_graphcut", "tau",        "filter_lr",
      "gcn_lr",      "momentum",     "weight_decay",  "filter_epochs",
      "filter_batch", "filter_hidden", "gcn_epochs",  "gcn_batch",
      "gcn_hidden",  "embed_dim",    "noise_rate",    "graph_mode",
      "cluster_mode", "use_structure", "rounds",      "threads",
      "seed",        "synth"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw_usage("unknown config key: " + it.key());
  }
  pick(j, "k", c.k);
  pick(j, "eta", c.eta);
  pick(j, "beta", c.beta);
  pick(j, "delta", c.delta);
  pick(j, "beta1", c.beta1);
  pick(j, "beta2", c.beta2);
  pick(j, "lambda", c.lambda);
  pick(j, "theta", c.theta);
  pick(j, "theta_round2", c.theta_round2);
  pick(j, "theta_graphcut", c.theta_graphcut);
  pick(j, "tau", c.tau);
  pick(j, "filter_lr", c.filter_lr);
  pick(j, "gcn_lr", c.gcn_lr);
  pick(j, "momentum", c.momentum);
  pick(j, "weight_decay", c.weight_decay);
  pick(j, "filter_epochs", c.filter_epochs);
  pick(j, "filter_batch", c.filter_batch);
  pick(j, "filter_hidden", c.filter_hidden);
  pick(j, "gcn_epochs", c.gcn_epochs);
  pick(j, "gcn_batch", c.gcn_batch);
  pick(j, "gcn_hidden", c.gcn_hidden);
  pick(j, "embed_dim", c.embed_dim);
  pick(j, "noise_rate", c.noise_rate);
  pick(j, "graph_mode", c.graph_mode);
  pick(j, "cluster_mode", c.cluster_mode);
  pick(j, "use_structure", c.use_structure);
  pick(j, "rounds", c.rounds);
  pick(j, "threads", c.threads);
  pick(j, "seed", c.seed);
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    pick(s, "classes", c.synth.classes);
    pick(s, "per_class", c.synth.per_class);
    pick(s, "dim", c.synth.dim);
    pick(s, "noise_sigma", c.synth.noise_sigma);
    pick(s, "seed", c.synth.seed);
  }
  return c;
}

}  // namespace

void PipelineConfig::validate() const {
  if (k < 1) throw_usage("config: k >= 1 violated");
  if (eta < 0.0 || eta > 1.0) throw_usage("config: 0 <= eta <= 1 violated");
  if (beta <= 0.0) throw_usage("config: beta > 0 violated");
  if (delta <= 0.0) throw_usage("config: delta > 0 violated");
  if (theta <= 0.0 || theta >= 1.0) throw_usage("config: 0 < theta < 1 violated");
  if (noise_rate < 0.0 || noise_rate >= 1.0)
    throw_usage("config: noise_rate in [0,1) violated");
  if (graph_mode != "adaptive" && graph_mode != "knn" &&
      graph_mode != "threshold")
    throw_usage("config: unknown graph_mode '" + graph_mode + "'");
  if (cluster_mode != "gcn" && cluster_mode != "graphcut")
    throw_usage("config: unknown cluster_mode '" + cluster_mode + "'");
  if (rounds != 1 && rounds != 2) throw_usage("config: rounds must be 1 or 2");
  if (filter_epochs < 0 || gcn_epochs < 0)
    throw_usage("config: epoch counts must be non-negative");
  if (filter_batch < 1 || gcn_batch < 1)
    throw_usage("config: batch sizes must be >= 1");
  if (filter_hidden < 1 || gcn_hidden < 1 || embed_dim < 1)
    throw_usage("config: layer widths must be >= 1");
  synth.validate();
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_usage(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string PipelineConfig::to_json_text() const {
  return to_json(*this).dump(2) + "\n";
}

void PipelineConfig::set_field(const std::string& key,
                               const std::string& value) {
  json j = to_json(*this);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings (e.g. graph_mode=knn)
  }
  auto dot = key.find('.');
  try {
    if (dot == std::string::npos) {
      if (!j.contains(key)) throw_usage("unknown config key: " + key);
      j[key] = parsed;
    } else {
      std::string outer = key.substr(0, dot), inner = key.substr(dot + 1);
      if (!j.contains(outer) || !j[outer].contains(inner))
        throw_usage("unknown config key: " + key);
      j[outer][inner] = parsed;
    }
    *this = from_json(j);
  } catch (const json::exception& e) {
    throw_usage("bad value for config key " + key + ": " + e.what());
  }
}

std::uint64_t PipelineConfig::hash() const {
  std::string dump = to_json(*this).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace adanets
