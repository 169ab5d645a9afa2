// runconfig.hpp
// Line-oriented key = value configuration with [sections], strict schema
// validation, and default filling. Unknown sections or keys are rejected so
// a mistyped parameter can never be silently defaulted.
//
// Layout: the [run] section carries the shared keys (seed), the [<kind>]
// section carries the experiment parameters. A bare key outside any section
// is treated as belonging to the kind section. Overrides from the command
// line use the same key names, with "run." prefixes for the shared section.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfes::cli {

enum class ParamType { integer, real, text, flag };

struct ParamDef {
  std::string name;
  ParamType type = ParamType::real;
  std::string default_value;  // empty string means required
  bool required = false;
  // Inclusive numeric constraints; the message names the failing bound.
  std::optional<double> min, max;
  std::vector<std::string> choices;  // for text params, empty = free form
};

struct KindSchema {
  std::string kind;
  std::vector<ParamDef> params;
  const ParamDef* find(const std::string& name) const;
};

// Declarative registry of every experiment kind and its parameters.
const std::vector<KindSchema>& all_schemas();
const KindSchema& schema_for(const std::string& kind);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunConfig {
  std::string kind;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::map<std::string, std::string> params;  // fully resolved, defaults filled
  std::vector<std::string> notices;           // e.g. canonicalization messages

  long get_int(const std::string& name) const;
  double get_real(const std::string& name) const;
  const std::string& get_text(const std::string& name) const;
  bool get_flag(const std::string& name) const;
};

// Parse a config file (optional) plus command-line overrides into a
// validated RunConfig. Throws ConfigError with the offending key or
// constraint in the message.
RunConfig parse_config(const std::string& kind, const std::optional<std::string>& path,
                       const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed_override,
                       const std::string& out_dir);

}  // namespace qfes::cli
