#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomgate/errors.hpp"
#include "geomgate/model.hpp"

namespace geomgate::config {

enum class OutputFormat { json, csv };

/// Parsed run configuration. Physics values are dimensionless ratios to g.
struct RunConfig {
  model::SystemParams params;
  std::optional<std::string> preset;  // "A" or "B"
  std::string output_path;            // empty: stdout
  OutputFormat format = OutputFormat::json;
  std::vector<std::string> override_log;  // preset-vs-field override notes
};

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(const std::string& text) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

namespace detail {

inline const std::vector<std::string>& physics_keys() {
  static const std::vector<std::string> keys = {
      "omega", "delta_large", "delta_small", "gamma_cav", "t_total"};
  return keys;
}

inline double require_finite(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) {
    throw ConfigError("BadType", "config field '" + key + "' must be a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw NonFiniteValueError(key);
  return v;
}

inline model::ModelKind parse_model_kind(const std::string& s) {
  if (s == "full") return model::ModelKind::full;
  if (s == "effective") return model::ModelKind::effective;
  if (s == "transformed") return model::ModelKind::transformed;
  if (s == "effective_lindblad") return model::ModelKind::effective_lindblad;
  throw ConfigError("BadValue", "unknown model_kind: " + s);
}

}  // namespace detail

inline model::Preset preset_by_name(const std::string& name) {
  if (name == "A") return model::preset_a();
  if (name == "B") return model::preset_b();
  throw ConfigError("BadValue", "unknown preset: " + name + " (expected A or B)");
}

/// Strict JSON config parsing: unknown keys are errors, physics values are
/// ratios to g. A preset supplies every field; its physics values win over
/// explicitly given ones (logged), while n_max/dt/model_kind stay overridable.
inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("BadJson", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("BadJson", "config must be a JSON object");

  static const std::vector<std::string> known = {
      "preset",  "omega", "delta_large", "delta_small", "gamma_cav",
      "n_max",   "t_total", "dt",        "model_kind",  "output_path",
      "format"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : known) ok = ok || (k == item.key());
    if (!ok) throw UnknownFieldError(item.key());
  }

  RunConfig cfg;
  const bool has_preset = j.contains("preset");
  if (has_preset) {
    if (!j["preset"].is_string()) {
      throw ConfigError("BadType", "config field 'preset' must be a string");
    }
    cfg.preset = j["preset"].get<std::string>();
    cfg.params = preset_by_name(*cfg.preset).params;
  } else {
    // Required fields when no preset supplies them; gamma_cav defaults to 0.
    for (const std::string& key :
         {"omega", "delta_large", "delta_small", "n_max", "t_total", "dt",
          "model_kind"}) {
      if (!j.contains(key)) throw MissingFieldError(key);
    }
  }

  auto read_physics = [&](const std::string& key, double& target) {
    if (!j.contains(key)) return;
    const double v = detail::require_finite(j[key], key);
    if (has_preset) {
      if (v != target) {
        cfg.override_log.push_back("preset " + *cfg.preset + " overrides " + key +
                                   " = " + std::to_string(v) + " with " +
                                   std::to_string(target));
      }
      return;  // preset wins on physics fields
    }
    target = v;
  };
  read_physics("omega", cfg.params.omega);
  read_physics("delta_large", cfg.params.delta_large);
  read_physics("delta_small", cfg.params.delta_small);
  read_physics("gamma_cav", cfg.params.gamma_cav);
  read_physics("t_total", cfg.params.t_total);

  if (j.contains("n_max")) {
    const double v = detail::require_finite(j["n_max"], "n_max");
    if (v < 1.0 || v != std::floor(v)) {
      throw ConfigError("BadValue", "n_max must be an integer >= 1");
    }
    cfg.params.n_max = static_cast<int>(v);
  }
  if (j.contains("dt")) {
    const double v = detail::require_finite(j["dt"], "dt");
    if (v <= 0.0) throw ConfigError("BadValue", "dt must be > 0");
    cfg.params.dt = v;
  }
  if (j.contains("model_kind")) {
    if (!j["model_kind"].is_string()) {
      throw ConfigError("BadType", "config field 'model_kind' must be a string");
    }
    cfg.params.model_kind = detail::parse_model_kind(j["model_kind"].get<std::string>());
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) {
      throw ConfigError("BadType", "config field 'output_path' must be a string");
    }
    cfg.output_path = j["output_path"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) {
      throw ConfigError("BadType", "config field 'format' must be a string");
    }
    const std::string f = j["format"].get<std::string>();
    if (f == "json") {
      cfg.format = OutputFormat::json;
    } else if (f == "csv") {
      cfg.format = OutputFormat::csv;
    } else {
      throw ConfigError("BadValue", "format must be 'json' or 'csv'");
    }
  }

  if (cfg.params.t_total < 0.0) throw ConfigError("BadValue", "t_total must be >= 0");
  if (cfg.params.gamma_cav < 0.0) throw ConfigError("BadValue", "gamma_cav must be >= 0");
  return cfg;
}

/// Canonical serialization. Uses full precision so that
/// parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string s = "{";
  if (cfg.preset) s += "\"preset\":\"" + *cfg.preset + "\",";
  s += "\"omega\":" + num(cfg.params.omega);
  s += ",\"delta_large\":" + num(cfg.params.delta_large);
  s += ",\"delta_small\":" + num(cfg.params.delta_small);
  s += ",\"gamma_cav\":" + num(cfg.params.gamma_cav);
  s += ",\"n_max\":" + std::to_string(cfg.params.n_max);
  s += ",\"t_total\":" + num(cfg.params.t_total);
  s += ",\"dt\":" + num(cfg.params.dt);
  s += ",\"model_kind\":\"" + model::to_string(cfg.params.model_kind) + "\"";
  if (!cfg.output_path.empty()) s += ",\"output_path\":\"" + cfg.output_path + "\"";
  s += ",\"format\":\"" +
       std::string(cfg.format == OutputFormat::json ? "json" : "csv") + "\"";
  s += "}";
  return s;
}

// ---------------------------------------------------------------------------
// Sweep specifications.
// ---------------------------------------------------------------------------

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepSpec {
  enum class Mode { grid, zip };
  std::vector<SweepAxis> axes;
  Mode mode = Mode::grid;

  std::size_t point_count() const {
    if (axes.empty()) return 0;
    if (mode == Mode::zip) return axes.front().values.size();
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
  }
};

inline bool sweepable_param(const std::string& name) {
  for (const char* k :
       {"omega", "delta_large", "delta_small", "gamma_cav", "n_max", "t_total", "dt"}) {
    if (name == k) return true;
  }
  return false;
}

inline SweepSpec parse_sweep_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("BadJson", std::string("sweep spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("BadJson", "sweep spec must be a JSON object");
  for (const auto& item : j.items()) {
    if (item.key() != "axes" && item.key() != "mode") {
      throw UnknownFieldError(item.key());
    }
  }
  if (!j.contains("axes")) throw MissingFieldError("axes");
  if (!j["axes"].is_array()) {
    throw ConfigError("BadValue", "sweep spec 'axes' must be an array");
  }
  if (j["axes"].empty()) throw UsageError("sweep spec has no axes");

  SweepSpec spec;
  if (j.contains("mode")) {
    const std::string m = j["mode"].get<std::string>();
    if (m == "grid") {
      spec.mode = SweepSpec::Mode::grid;
    } else if (m == "zip") {
      spec.mode = SweepSpec::Mode::zip;
    } else {
      throw ConfigError("BadValue", "sweep mode must be 'grid' or 'zip'");
    }
  }

  for (const auto& ja : j["axes"]) {
    SweepAxis axis;
    for (const auto& item : ja.items()) {
      if (item.key() != "name" && item.key() != "values" && item.key() != "linspace") {
        throw UnknownFieldError(item.key());
      }
    }
    if (!ja.contains("name")) throw MissingFieldError("axes[].name");
    axis.name = ja["name"].get<std::string>();
    if (!sweepable_param(axis.name)) {
      throw ConfigError("BadValue", "axis '" + axis.name +
                                        "' is not a sweepable SystemParams field");
    }
    if (ja.contains("values")) {
      for (const auto& v : ja["values"]) {
        axis.values.push_back(detail::require_finite(v, axis.name));
      }
    } else if (ja.contains("linspace")) {
      const auto& ls = ja["linspace"];
      const double start = detail::require_finite(ls.at("start"), axis.name);
      const double stop = detail::require_finite(ls.at("stop"), axis.name);
      const int count = ls.at("count").get<int>();
      if (count < 1) throw ConfigError("BadValue", "linspace count must be >= 1");
      for (int k = 0; k < count; ++k) {
        axis.values.push_back(
            count == 1 ? start : start + (stop - start) * k / (count - 1));
      }
    } else {
      throw MissingFieldError("axes[].values");
    }
    if (axis.values.empty()) {
      throw UsageError("sweep axis '" + axis.name + "' has no values");
    }
    spec.axes.push_back(std::move(axis));
  }

  if (spec.mode == SweepSpec::Mode::zip) {
    for (const auto& a : spec.axes) {
      if (a.values.size() != spec.axes.front().values.size()) {
        throw ConfigError("BadValue", "zip mode requires equal-length axes");
      }
    }
  }
  return spec;
}

/// Apply one named parameter to a SystemParams copy.
inline void apply_param(model::SystemParams& p, const std::string& name, double v) {
  if (name == "omega") p.omega = v;
  else if (name == "delta_large") p.delta_large = v;
  else if (name == "delta_small") p.delta_small = v;
  else if (name == "gamma_cav") p.gamma_cav = v;
  else if (name == "n_max") p.n_max = static_cast<int>(v);
  else if (name == "t_total") p.t_total = v;
  else if (name == "dt") p.dt = v;
  else throw ConfigError("BadValue", "unknown parameter: " + name);
}

}  // namespace geomgate::config
