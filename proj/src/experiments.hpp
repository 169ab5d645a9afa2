// experiments.hpp
// Experiment dispatch: one call per CLI invocation, CSV data files plus a
// JSON run manifest, byte-identical outputs under a fixed config and seed.

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "runconfig.hpp"

namespace qfes::cli {

struct RunManifest {
  std::string kind;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0;
  std::map<std::string, std::string> output_checksums;  // filename -> fnv1a-64 hex
  std::string manifest_path;
};

// Runs the experiment described by the config, writes outputs into
// cfg.out_dir, and returns the manifest (also written as manifest.json).
RunManifest execute(const RunConfig& cfg);

// FNV-1a 64-bit checksum of a file's bytes, hex-encoded.
std::string file_checksum(const std::string& path);

}  // namespace qfes::cli
