#include "runconfig.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qfes::cli {

namespace {

ParamDef integer(std::string name, std::string def, double min, double max) {
  ParamDef p;
  p.name = std::move(name);
  p.type = ParamType::integer;
  p.default_value = std::move(def);
  p.required = p.default_value.empty();
  p.min = min;
  p.max = max;
  return p;
}

ParamDef real(std::string name, std::string def, std::optional<double> min = std::nullopt,
              std::optional<double> max = std::nullopt) {
  ParamDef p;
  p.name = std::move(name);
  p.type = ParamType::real;
  p.default_value = std::move(def);
  p.required = p.default_value.empty();
  p.min = min;
  p.max = max;
  return p;
}

ParamDef text(std::string name, std::string def, std::vector<std::string> choices = {}) {
  ParamDef p;
  p.name = std::move(name);
  p.type = ParamType::text;
  p.default_value = std::move(def);
  p.required = p.default_value.empty();
  p.choices = std::move(choices);
  return p;
}

ParamDef flag(std::string name, std::string def) {
  ParamDef p;
  p.name = std::move(name);
  p.type = ParamType::flag;
  p.default_value = std::move(def);
  return p;
}

std::vector<KindSchema> build_schemas() {
  std::vector<KindSchema> s;

  s.push_back({"ghz",
               {integer("qubits", "3", 2, 12), integer("shots", "1024", 1, 100000000)}});

  s.push_back({"qft-check", {integer("n_max", "6", 1, 10)}});

  s.push_back({"qpe",
               {real("phase", "", 0.0, 6.283185307179586), integer("m", "4", 1, 12)}});

  s.push_back({"qae",
               {integer("qubits", "4", 1, 8), text("marked", ""), integer("m", "6", 1, 12)}});

  s.push_back({"gkls",
               {real("relax_rate", "0", 0.0), real("dephase_rate", "0", 0.0),
                real("t_final", "5", 1e-9), integer("samples", "200", 2, 100000),
                text("initial", "plus_x", {"plus_x", "one"})}});

  s.push_back({"sawtooth-run",
               {real("K", ""), integer("qubits", "8", 2, 16), real("tau", "1", 1e-9),
                integer("steps", "500", 1, 100000),
                text("mode", "both", {"classical", "quantum", "both"}),
                integer("ensemble", "1024", 1, 1000000), real("p_over_pi", "0.75"),
                integer("husimi_nq", "32", 8, 256), integer("husimi_np", "32", 8, 256),
                integer("husimi_average", "50", 1, 1000),
                text("scheme", "crank-nicolson", {"crank-nicolson"})}});

  s.push_back({"sawtooth-echo",
               {real("K", ""), integer("qubits", "8", 2, 14), real("tau", "1", 1e-9),
                real("epsilon", "1e-3", 0.0), integer("steps", "60", 1, 100000),
                text("mode", "jitter", {"jitter", "lindblad"}), real("relax_rate", "0", 0.0),
                real("dephase_rate", "0.01", 0.0),
                text("scheme", "crank-nicolson", {"crank-nicolson"})}});

  s.push_back({"threewave",
               {integer("s2", "", 0, 500), integer("s3", "", 0, 500), real("g_re", "1"),
                real("g_im", "0"), real("dt", "1e-3", 1e-9, 0.5),
                integer("steps", "2000", 5, 1000000), integer("initial_j", "0", 0, 500)}});

  s.push_back({"embed-kvn",
               {real("gamma", "1"), integer("grid", "512", 16, 16384), real("half_width", "2", 0.1),
                real("z0", "0.75"), real("sigma", "0.25", 1e-6), real("dt", "1e-3", 1e-12),
                integer("steps", "3000", 1, 10000000), real("theta", "0.5", 0.0, 1.0),
                text("direction", "forward", {"forward", "backward"})}});

  s.push_back({"embed-liouville",
               {real("gamma", "1"), integer("grid", "512", 16, 16384), real("half_width", "2", 0.1),
                real("z0", "0.75"), real("sigma", "0.25", 1e-6), real("dt", "1e-3", 1e-12),
                integer("steps", "1000", 1, 10000000), real("theta", "0.5", 0.0, 1.0),
                flag("upwind", "false")}});

  s.push_back({"embed-carleman",
               {text("coefficients", "0,1,-1"), real("z0", "0.1"), real("dt", "1e-3", 1e-12),
                integer("steps", "5000", 5, 10000000), integer("order", "8", 1, 64),
                flag("rescale", "true")}});

  s.push_back({"rkhs-table",
               {text("space", "all", {"all", "segal-bargmann", "bergman", "hardy"}),
                integer("max_order", "20", 1, 20),
                text("metric", "factorial-normalized", {"factorial-normalized", "raw-moment"}),
                text("ladder", "multiplication-raises", {"multiplication-raises", "derivative-raises"})}});

  return s;
}

bool parse_integer(const std::string& s, long& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_real(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

const ParamDef* KindSchema::find(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

const std::vector<KindSchema>& all_schemas() {
  static const std::vector<KindSchema> schemas = build_schemas();
  return schemas;
}

const KindSchema& schema_for(const std::string& kind) {
  for (const auto& s : all_schemas())
    if (s.kind == kind) return s;
  std::string known;
  for (const auto& s : all_schemas()) known += (known.empty() ? "" : ", ") + s.kind;
  throw ConfigError("unknown experiment kind '" + kind + "' (known kinds: " + known + ")");
}

long RunConfig::get_int(const std::string& name) const {
  long v = 0;
  parse_integer(params.at(name), v);
  return v;
}

double RunConfig::get_real(const std::string& name) const {
  double v = 0;
  parse_real(params.at(name), v);
  return v;
}

const std::string& RunConfig::get_text(const std::string& name) const { return params.at(name); }

bool RunConfig::get_flag(const std::string& name) const {
  const std::string& v = params.at(name);
  return v == "true" || v == "1" || v == "yes" || v == "on";
}

RunConfig parse_config(const std::string& kind, const std::optional<std::string>& path,
                       const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed_override,
                       const std::string& out_dir) {
  const KindSchema& schema = schema_for(kind);

  std::map<std::string, std::string> run_section, kind_section;

  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file '" + *path + "'");
    std::string line, section = kind;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("malformed section header at line " + std::to_string(line_no));
        section = trim(line.substr(1, line.size() - 2));
        if (section != "run" && section != kind)
          throw ConfigError("unknown section '[" + section + "]' for kind '" + kind + "'");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("expected key = value at line " + std::to_string(line_no) + ": '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
      auto& target = (section == "run") ? run_section : kind_section;
      if (target.count(key)) throw ConfigError("duplicate key '" + key + "'");
      target[key] = value;
    }
  }

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + ov + "'");
    std::string key = trim(ov.substr(0, eq));
    const std::string value = trim(ov.substr(eq + 1));
    if (key.rfind("run.", 0) == 0)
      run_section[key.substr(4)] = value;
    else
      kind_section[key] = value;
  }

  // Shared section: only 'seed' and 'kind' are understood.
  RunConfig cfg;
  cfg.kind = kind;
  cfg.out_dir = out_dir;
  for (const auto& [key, value] : run_section) {
    if (key == "seed") {
      long seed = 0;
      if (!parse_integer(value, seed) || seed < 0) throw ConfigError("constraint violated: seed must be a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "kind") {
      if (value != kind) throw ConfigError("config kind '" + value + "' does not match requested '" + kind + "'");
    } else {
      throw ConfigError("unknown key '" + key + "' in [run] section");
    }
  }
  if (seed_override) cfg.seed = *seed_override;

  // Kind section: strict against the schema.
  for (const auto& [key, value] : kind_section) {
    const ParamDef* def = schema.find(key);
    if (!def) throw ConfigError("unknown key '" + key + "' for kind '" + kind + "'");
    cfg.params[key] = value;
  }
  for (const auto& def : schema.params) {
    auto it = cfg.params.find(def.name);
    if (it == cfg.params.end()) {
      if (def.required) throw ConfigError("missing required parameter '" + def.name + "'");
      cfg.params[def.name] = def.default_value;
      continue;
    }
    const std::string& value = it->second;
    switch (def.type) {
      case ParamType::integer: {
        long v = 0;
        if (!parse_integer(value, v))
          throw ConfigError("parameter '" + def.name + "' expects an integer, got '" + value + "'");
        if (def.min && v < *def.min)
          throw ConfigError("constraint violated: " + def.name + " must be >= " +
                            std::to_string(static_cast<long>(*def.min)));
        if (def.max && v > *def.max)
          throw ConfigError("constraint violated: " + def.name + " must be <= " +
                            std::to_string(static_cast<long>(*def.max)));
        break;
      }
      case ParamType::real: {
        double v = 0;
        if (!parse_real(value, v))
          throw ConfigError("parameter '" + def.name + "' expects a number, got '" + value + "'");
        if (def.min && v < *def.min) {
          std::ostringstream msg;
          msg << "constraint violated: " << def.name << " must be >= " << *def.min;
          throw ConfigError(msg.str());
        }
        if (def.max && v > *def.max) {
          std::ostringstream msg;
          msg << "constraint violated: " << def.name << " must be <= " << *def.max;
          throw ConfigError(msg.str());
        }
        break;
      }
      case ParamType::text:
        if (!def.choices.empty()) {
          bool ok = false;
          for (const auto& c : def.choices) ok = ok || c == value;
          if (!ok) throw ConfigError("parameter '" + def.name + "' must be one of its declared choices, got '" +
                                     value + "'");
        }
        break;
      case ParamType::flag:
        if (value != "true" && value != "false" && value != "0" && value != "1" && value != "yes" &&
            value != "no" && value != "on" && value != "off")
          throw ConfigError("parameter '" + def.name + "' expects a boolean, got '" + value + "'");
        break;
    }
  }

  // Kind-specific cross-parameter canonicalization.
  if (kind == "threewave") {
    const long s2 = cfg.get_int("s2"), s3 = cfg.get_int("s3");
    if (s2 < s3) {
      cfg.params["s2"] = std::to_string(s3);
      cfg.params["s3"] = std::to_string(s2);
      cfg.notices.push_back("relabeled modes 2<->3: (s2, s3) canonicalized to (" + std::to_string(s3) + ", " +
                            std::to_string(s2) + ")");
    }
    if (cfg.get_int("initial_j") > std::min(cfg.get_int("s2"), cfg.get_int("s3")))
      throw ConfigError("constraint violated: initial_j must be <= min(s2, s3)");
  }
  if (kind == "qae" && !cfg.params["marked"].empty()) {
    // Validate the marked list: comma-separated basis indices below 2^qubits.
    const long dim = 1L << cfg.get_int("qubits");
    std::stringstream ss(cfg.params["marked"]);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      long v = 0;
      if (!parse_integer(trim(tok), v))
        throw ConfigError("parameter 'marked' expects comma-separated integers, got '" + tok + "'");
      if (v < 0 || v >= dim) throw ConfigError("constraint violated: marked state " + tok + " must be < 2^qubits");
    }
  }

  return cfg;
}

}  // namespace qfes::cli
