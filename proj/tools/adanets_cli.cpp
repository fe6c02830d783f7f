// Command-line front end; talks to the library exclusively through the C API.
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adanets/adanets.h"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;  // key=value
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
};

int fail(ada_status status) {
  std::fprintf(stderr, "error: %s\n", ada_last_error());
  return static_cast<int>(status);
}

// Build the config from --config plus CLI overrides (CLI wins).
ada_status make_config(const GlobalArgs& args, ada_config** out) {
  ada_status st = args.config_path.empty()
                      ? ada_config_create(out)
                      : ada_config_load(args.config_path.c_str(), out);
  if (st != ADA_OK) return st;
  if (args.seed_set) {
    st = ada_config_set(*out, "seed", std::to_string(args.seed).c_str());
    if (st != ADA_OK) return st;
  }
  if (args.threads >= 0) {
    st = ada_config_set(*out, "threads", std::to_string(args.threads).c_str());
    if (st != ADA_OK) return st;
  }
  for (const std::string& kv : args.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got %s\n",
                   kv.c_str());
      return ADA_ERR_USAGE;
    }
    st = ada_config_set(*out, kv.substr(0, eq).c_str(),
                        kv.substr(eq + 1).c_str());
    if (st != ADA_OK) return st;
  }
  return ADA_OK;
}

int run_stage_cmd(const GlobalArgs& args, const std::string& stage) {
  ada_config* config = nullptr;
  ada_status st = make_config(args, &config);
  if (st != ADA_OK) return fail(st);
  st = ada_run_stage(config, stage.c_str(), args.out_dir.c_str());
  ada_config_destroy(config);
  if (st != ADA_OK) return fail(st);
  std::printf("%s: ok (%s)\n", stage.c_str(), args.out_dir.c_str());
  return 0;
}

int run_pipeline_cmd(const GlobalArgs& args) {
  ada_config* config = nullptr;
  ada_status st = make_config(args, &config);
  if (st != ADA_OK) return fail(st);
  char* report = nullptr;
  st = ada_run_pipeline(config, args.out_dir.c_str(), &report);
  ada_config_destroy(config);
  if (st != ADA_OK) return fail(st);
  std::fputs(report, stdout);
  ada_string_free(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive neighbour-discovery face clustering pipeline"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", args.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", args.seed, "master RNG seed");
  app.add_option("--threads", args.threads, "worker threads (0 = all cores)");
  app.add_option("--set", args.overrides,
                 "override a config field, e.g. --set eta=0.3")
      ->take_all();

  const char* stages[] = {"synth",       "knn",       "rerank", "train-filter",
                          "discover",    "build-graph", "train-gcn", "embed",
                          "cluster",     "eval"};
  for (const char* stage : stages)
    app.add_subcommand(stage, std::string("run the ") + stage + " stage");
  app.add_subcommand("pipeline", "run every stage and print the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ADA_ERR_USAGE);
  }

  args.seed_set = seed_opt->count() > 0;
  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "pipeline") return run_pipeline_cmd(args);
  return run_stage_cmd(args, name);
}
