#pragma once

// Run configuration: model choice, overrides, numeric settings and output.
// Precedence: command-line flags > config file > catalog defaults.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/model.hpp"

namespace horizonlab {

struct RunConfig {
  std::string model;        // catalog name
  std::string custom_path;  // custom-potential JSON file; wins over `model` when set
  std::map<std::string, double> overrides;
  int order = 16;
  double tol = 1e-10;
  int grid = 400;
  std::string output;  // empty: stdout
  std::string format = "json";
  std::uint64_t seed = 1;

  static const std::set<std::string>& override_keys() {
    static const std::set<std::string> k{"Lambda", "lambda2", "m2", "k", "D", "Q",  "q0",  "H0",
                                         "phi0",   "N0",      "C0", "a", "g0", "c", "v", "g",
                                         "q_r",    "with_eta"};
    return k;
  }

  // Run-level values that are not model parameters.
  static bool run_level(const std::string& key) {
    return key == "H0" || key == "phi0" || key == "N0" || key == "C0";
  }

  void set_override(const std::string& key, double v) {
    if (!override_keys().count(key)) throw DomainError("unknown parameter '" + key + "'");
    overrides[key] = v;
  }

  std::optional<double> get(const std::string& key) const {
    auto it = overrides.find(key);
    if (it == overrides.end()) return std::nullopt;
    return it->second;
  }

  double get_or(const std::string& key, double fallback) const { return get(key).value_or(fallback); }

  ModelSpec build() const {
    if (!custom_path.empty()) {
      std::ifstream in(custom_path);
      if (!in) throw DomainError("cannot open custom model file '" + custom_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("custom model file is not valid JSON: ") + e.what());
      }
      auto m = build_custom(j);
      for (const auto& [k, v] : overrides) m.params[k] = v;
      return m;
    }
    if (model.empty()) throw DomainError("no model given");
    const auto& entry = catalog_entry(model);
    Params p;
    for (const auto& [k, v] : overrides)
      if (!run_level(k) && entry.defaults.count(k)) p[k] = v;
    for (const auto& [k, v] : overrides)
      if (!run_level(k) && !entry.defaults.count(k) && k != "q0")
        throw DomainError("model '" + model + "' has no parameter '" + k + "'");
    return build_model(model, p);
  }

  // Charge: explicit override, else the model's default.
  double q0(const ModelSpec& m) const { return get_or("q0", m.param("q0", 0.0)); }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = c.model;
  j["custom_path"] = c.custom_path;
  j["overrides"] = c.overrides;
  j["order"] = c.order;
  j["tol"] = c.tol;
  j["grid"] = c.grid;
  j["output"] = c.output;
  j["format"] = c.format;
  j["seed"] = c.seed;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  static const std::set<std::string> keys{"model", "custom_path", "overrides", "order", "tol",
                                          "grid",  "output",      "format",    "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw DomainError("unknown config key '" + it.key() + "'");
  RunConfig c;
  try {
    if (j.contains("model")) c.model = j["model"].get<std::string>();
    if (j.contains("custom_path")) c.custom_path = j["custom_path"].get<std::string>();
    if (j.contains("overrides")) {
      if (!j["overrides"].is_object()) throw DomainError("config 'overrides' must be an object");
      for (auto it = j["overrides"].begin(); it != j["overrides"].end(); ++it)
        c.set_override(it.key(), it.value().get<double>());
    }
    if (j.contains("order")) c.order = j["order"].get<int>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("grid")) c.grid = j["grid"].get<int>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::type_error& e) {
    throw DomainError(std::string("config value has the wrong type: ") + e.what());
  }
  if (c.format != "json" && c.format != "csv" && c.format != "svg")
    throw DomainError("format must be json, csv or svg");
  if (c.order < 1) throw DomainError("order must be >= 1");
  if (!(c.tol > 0.0)) throw DomainError("tol must be > 0");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config file is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace horizonlab
