// qfes_main.cpp
// Command-line front end:
//   qfes <kind> [--config <file>] [--set key=value]... [--out <dir>] [--seed <u64>]
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "runconfig.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qfes: quantum-dynamics experiment runner"};
  app.require_subcommand(0);

  std::string kind;
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;

  app.add_option("kind", kind, "experiment kind (see --list)")->required(false);
  app.add_option("--config", config_path, "config file (key = value lines with [sections])");
  app.add_option("--set", overrides, "override a parameter, e.g. --set K=0.5 or --set run.seed=7");
  app.add_option("--out", out_dir, "output directory (created if missing)");
  auto* seed_opt = app.add_option("--seed", seed, "64-bit run seed (overrides the config)");
  bool list_kinds = false;
  app.add_flag("--list", list_kinds, "list experiment kinds and their parameters");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  if (list_kinds) {
    for (const auto& schema : qfes::cli::all_schemas()) {
      std::printf("%s\n", schema.kind.c_str());
      for (const auto& p : schema.params)
        std::printf("  %-16s %s%s\n", p.name.c_str(),
                    p.required ? "(required)" : ("default = " + p.default_value).c_str(),
                    p.choices.empty() ? "" : "  [choice]");
    }
    return 0;
  }

  if (kind.empty()) {
    std::fprintf(stderr, "error: an experiment kind is required (try --list)\n");
    return 2;
  }

  try {
    auto cfg = qfes::cli::parse_config(
        kind, config_path.empty() ? std::nullopt : std::optional<std::string>(config_path), overrides,
        seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt, out_dir);
    for (const auto& note : cfg.notices) std::fprintf(stderr, "[qfes] notice: %s\n", note.c_str());

    auto manifest = qfes::cli::execute(cfg);
    std::printf("wrote %s (%zu output file%s, %.3f s)\n", manifest.manifest_path.c_str(),
                manifest.output_checksums.size(), manifest.output_checksums.size() == 1 ? "" : "s",
                manifest.wall_clock_seconds);
    return 0;
  } catch (const qfes::cli::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "runtime error: %s\n", err.what());
    return 3;
  }
}
