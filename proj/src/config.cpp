#include "sfl/config.hpp"

#include <fstream>
#include <sstream>

#include "sfl/error.hpp"
#include "sfl/version.hpp"

namespace sfl {

using nlohmann::json;

namespace {

const json& require_field(const json& j, const std::string& key,
                          const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError("config: missing required field " + path + "/" + key);
  }
  return j.at(key);
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  const json& v = require_field(j, key, path);
  if (!v.is_number()) {
    throw ConfigError("config: field " + path + "/" + key + " must be a number");
  }
  return v.get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) {
    throw ConfigError("config: field " + key + " must be a number");
  }
  return v.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& key,
                         const std::string& path) {
  const json& v = require_field(j, key, path);
  if (!v.is_number_integer()) {
    throw ConfigError("config: field " + path + "/" + key +
                      " must be an integer");
  }
  return v.get<std::int64_t>();
}

rng::SeedSpec get_seed(const json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ConfigError("config: " + path +
                      " must be an object with master_seed/stream_id");
  }
  rng::SeedSpec s;
  s.master_seed = static_cast<std::uint64_t>(get_integer(j, "master_seed", path));
  if (j.contains("stream_id")) {
    s.stream_id = static_cast<std::uint64_t>(get_integer(j, "stream_id", path));
  }
  return s;
}

std::vector<double> get_spectrum(const json& j, int count,
                                 const std::string& path) {
  const std::string type = require_field(j, "type", path).get<std::string>();
  if (type == "constant") {
    return constant_spectrum(count, get_number(j, "value", path));
  }
  if (type == "linear") {
    return linear_spectrum(count, get_number(j, "min", path),
                           get_number(j, "max", path));
  }
  if (type == "explicit") {
    const json& vals = require_field(j, "values", path);
    if (!vals.is_array()) {
      throw ConfigError("config: " + path + "/values must be an array");
    }
    return vals.get<std::vector<double>>();
  }
  throw ConfigError("config: " + path + "/type must be constant, linear, or explicit");
}

ShiftKind parse_shift_kind(const std::string& name, const std::string& path) {
  if (name == "zero") return ShiftKind::Zero;
  if (name == "rank_one") return ShiftKind::RankOne;
  if (name == "haar_rotated_diagonal") return ShiftKind::HaarRotatedDiagonal;
  throw ConfigError("config: " + path +
                    "/kind must be zero, rank_one, or haar_rotated_diagonal");
}

const char* shift_kind_name(ShiftKind k) {
  switch (k) {
    case ShiftKind::Zero:
      return "zero";
    case ShiftKind::RankOne:
      return "rank_one";
    case ShiftKind::HaarRotatedDiagonal:
      return "haar_rotated_diagonal";
  }
  return "zero";
}

json seed_json(const rng::SeedSpec& s) {
  return json{{"master_seed", s.master_seed}, {"stream_id", s.stream_id}};
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  const std::string schema =
      require_field(j, "schema_version", "").get<std::string>();
  if (schema != kSchemaVersion) {
    throw ConfigError("config: unsupported schema_version '" + schema + "'");
  }

  ExperimentConfig cfg;
  const json& dims = require_field(j, "dims", "");
  cfg.dims.n = static_cast<int>(get_integer(dims, "n", "/dims"));
  cfg.dims.N = static_cast<int>(get_integer(dims, "N", "/dims"));
  cfg.dims.M = static_cast<int>(get_integer(dims, "M", "/dims"));
  cfg.dims.lambda_cap = get_number_or(dims, "lambda_cap", 4.0);
  cfg.dims.k0 = get_number_or(dims, "k0", 2.0);

  const json& dist = require_field(j, "dist", "");
  std::string kind = require_field(dist, "kind", "/dist").get<std::string>();
  double p = get_number_or(dist, "p", 0.5);
  try {
    cfg.dist = EntryDistribution::from_name(kind, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: /dist: ") + e.what());
  }

  if (j.contains("deformation")) {
    const json& def = j.at("deformation");
    if (def.contains("spectrum")) {
      cfg.deformation.spectrum =
          get_spectrum(def.at("spectrum"), cfg.dims.N, "/deformation/spectrum");
    } else {
      cfg.deformation.spectrum = constant_spectrum(cfg.dims.N, 1.0);
    }
    if (def.contains("rotation_seed")) {
      cfg.deformation.rotation_seed =
          get_seed(def.at("rotation_seed"), "/deformation/rotation_seed");
    }
    if (def.contains("identity_rotations")) {
      cfg.deformation.identity_rotations =
          def.at("identity_rotations").get<bool>();
    }
    if (def.contains("b")) {
      const json& bj = def.at("b");
      cfg.deformation.b_kind = parse_shift_kind(
          require_field(bj, "kind", "/deformation/b").get<std::string>(),
          "/deformation/b");
      cfg.deformation.b_norm_target = get_number_or(bj, "norm_target", 0.0);
    }
  } else {
    cfg.deformation.spectrum = constant_spectrum(cfg.dims.N, 1.0);
  }

  if (j.contains("truncation") && !j.at("truncation").is_null()) {
    const json& tr = j.at("truncation");
    TruncationParams tp;
    tp.omega = get_number_or(tr, "omega", 0.25);
    tp.gamma_target = get_number_or(tr, "gamma_target", 2.0);
    cfg.truncation = tp;
  }

  if (j.contains("sparsity")) {
    const json& sp = j.at("sparsity");
    cfg.sparsity.delta = get_number_or(sp, "delta", 0.1);
    cfg.sparsity.rho = get_number_or(sp, "rho", 0.3);
  }

  if (j.contains("lcd")) {
    const json& lc = j.at("lcd");
    cfg.lcd.alpha = get_number_or(lc, "alpha", 1.0);
    cfg.lcd.gamma = get_number_or(lc, "gamma", 0.1);
    cfg.lcd.theta_max = get_number_or(lc, "theta_max", 0.0);
    cfg.lcd.grid_tolerance = get_number_or(lc, "grid_tolerance", 1e-6);
  }

  if (j.contains("epsilon_grid")) {
    const json& grid = j.at("epsilon_grid");
    if (!grid.is_array()) {
      throw ConfigError("config: epsilon_grid must be an array");
    }
    cfg.epsilon_grid = grid.get<std::vector<double>>();
  }

  cfg.trials = get_integer(j, "trials", "");
  cfg.master_seed = get_seed(require_field(j, "master_seed", ""), "/master_seed");
  cfg.tau = get_number_or(j, "tau", 0.0);
  cfg.codim_l = static_cast<int>(
      j.contains("codim_l") ? get_integer(j, "codim_l", "") : 0);
  cfg.m_override = static_cast<int>(
      j.contains("m_override") ? get_integer(j, "m_override", "") : 0);

  try {
    cfg.validate_common();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

json canonical_config_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["dims"] = json{{"n", cfg.dims.n},
                   {"N", cfg.dims.N},
                   {"M", cfg.dims.M},
                   {"lambda_cap", cfg.dims.lambda_cap},
                   {"k0", cfg.dims.k0}};
  j["dist"] = json{{"kind", cfg.dist.name()}, {"p", cfg.dist.skew_p}};
  j["deformation"] =
      json{{"spectrum", json{{"type", "explicit"},
                             {"values", cfg.deformation.spectrum}}},
           {"rotation_seed", seed_json(cfg.deformation.rotation_seed)},
           {"identity_rotations", cfg.deformation.identity_rotations},
           {"b", json{{"kind", shift_kind_name(cfg.deformation.b_kind)},
                      {"norm_target", cfg.deformation.b_norm_target}}}};
  if (cfg.truncation) {
    j["truncation"] = json{{"omega", cfg.truncation->omega},
                           {"gamma_target", cfg.truncation->gamma_target}};
  } else {
    j["truncation"] = nullptr;
  }
  j["sparsity"] =
      json{{"delta", cfg.sparsity.delta}, {"rho", cfg.sparsity.rho}};
  j["lcd"] = json{{"alpha", cfg.lcd.alpha},
                  {"gamma", cfg.lcd.gamma},
                  {"theta_max", cfg.lcd.theta_max},
                  {"grid_tolerance", cfg.lcd.grid_tolerance}};
  j["epsilon_grid"] = cfg.epsilon_grid;
  j["trials"] = cfg.trials;
  j["master_seed"] = seed_json(cfg.master_seed);
  j["tau"] = cfg.tau;
  j["codim_l"] = cfg.codim_l;
  j["m_override"] = cfg.m_override;
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const std::string& bytes) {
  std::uint64_t h = fnv1a64(bytes);
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) {
    out << ((h >> shift) & 0xF);
  }
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  return hash_hex(canonical_config_json(cfg).dump());
}

std::string config_pool_hash(const ExperimentConfig& cfg) {
  json j = canonical_config_json(cfg);
  j.erase("master_seed");
  return hash_hex(j.dump());
}

}  // namespace sfl
