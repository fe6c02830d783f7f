#include "adanets/adanets.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/feature_io.hpp"
#include "core/synthetic.hpp"
#include "pipeline/pipeline.hpp"

using namespace adanets;

struct ada_config {
  PipelineConfig impl;
};

struct ada_features {
  FeatureMatrix impl;
};

namespace {

thread_local std::string g_last_error;

// All exceptions stop at this boundary and turn into status codes.
template <typename Fn>
ada_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ADA_OK;
  } catch (const AdaError& e) {
    g_last_error = e.what();
    return static_cast<ada_status>(e.exit_code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ADA_ERR_DATA;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw_usage(std::string("null argument: ") + what);
}

}  // namespace

extern "C" {

const char* ada_version(void) { return "1.0.0"; }

const char* ada_last_error(void) { return g_last_error.c_str(); }

void ada_string_free(char* s) { std::free(s); }

ada_status ada_config_create(ada_config** out) {
  return guarded([&] {
    require(out != nullptr, "out");
    *out = new ada_config{};
  });
}

ada_status ada_config_from_json(const char* json_text, ada_config** out) {
  return guarded([&] {
    require(json_text != nullptr, "json_text");
    require(out != nullptr, "out");
    *out = new ada_config{PipelineConfig::from_json_text(json_text)};
  });
}

ada_status ada_config_load(const char* path, ada_config** out) {
  return guarded([&] {
    require(path != nullptr, "path");
    require(out != nullptr, "out");
    *out = new ada_config{PipelineConfig::from_json_file(path)};
  });
}

ada_status ada_config_set(ada_config* config, const char* key,
                          const char* value) {
  return guarded([&] {
    require(config != nullptr, "config");
    require(key != nullptr, "key");
    require(value != nullptr, "value");
    config->impl.set_field(key, value);
    config->impl.validate();
  });
}

ada_status ada_config_dump(const ada_config* config, char** out_json) {
  return guarded([&] {
    require(config != nullptr, "config");
    require(out_json != nullptr, "out_json");
    *out_json = dup_string(config->impl.to_json_text());
  });
}

ada_status ada_config_hash(const ada_config* config, uint64_t* out_hash) {
  return guarded([&] {
    require(config != nullptr, "config");
    require(out_hash != nullptr, "out_hash");
    *out_hash = config->impl.hash();
  });
}

void ada_config_destroy(ada_config* config) { delete config; }

ada_status ada_features_load(const char* path, ada_features** out) {
  return guarded([&] {
    require(path != nullptr, "path");
    require(out != nullptr, "out");
    *out = new ada_features{load_features(path)};
  });
}

ada_status ada_features_generate(const ada_config* config,
                                 ada_features** out) {
  return guarded([&] {
    require(config != nullptr, "config");
    require(out != nullptr, "out");
    auto [features, labels] = generate_synthetic(config->impl.synth);
    (void)labels;
    *out = new ada_features{std::move(features)};
  });
}

int64_t ada_features_count(const ada_features* features) {
  return features != nullptr ? features->impl.n() : 0;
}

int64_t ada_features_dim(const ada_features* features) {
  return features != nullptr ? features->impl.d() : 0;
}

ada_status ada_features_save(const ada_features* features, const char* path) {
  return guarded([&] {
    require(features != nullptr, "features");
    require(path != nullptr, "path");
    save_features(features->impl, path);
  });
}

void ada_features_destroy(ada_features* features) { delete features; }

ada_status ada_run_stage(const ada_config* config, const char* stage,
                         const char* out_dir) {
  return guarded([&] {
    require(config != nullptr, "config");
    require(stage != nullptr, "stage");
    require(out_dir != nullptr, "out_dir");
    run_stage(stage, config->impl, out_dir);
  });
}

ada_status ada_run_pipeline(const ada_config* config, const char* out_dir,
                            char** out_report_json) {
  return guarded([&] {
    require(config != nullptr, "config");
    require(out_dir != nullptr, "out_dir");
    MetricsReport report =
        run_pipeline(config->impl, out_dir, config->impl.rounds);
    if (out_report_json != nullptr)
      *out_report_json = dup_string(report.to_json_text());
  });
}

}  // extern "C"
