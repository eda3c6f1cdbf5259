#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tanglescope/error.hpp"
#include "tanglescope/spectral.hpp"

namespace tanglescope {

/// eps_i = alpha_i * I_bT + beta_i * I_b2 + gamma_i  (alpha, beta in mK/uA; gamma in mK).
struct BiasMap {
  std::vector<double> alpha, beta, gamma;
  std::string label;

  std::vector<double> epsilon(double i_bt, double i_b2) const {
    std::vector<double> eps(alpha.size());
    for (std::size_t k = 0; k < eps.size(); ++k) eps[k] = alpha[k] * i_bt + beta[k] * i_b2 + gamma[k];
    return eps;
  }

  /// Uncalibrated default: alpha = s(+1,-1,+1,-1,...), beta = s(+1,..,-1,..)
  /// split at the middle qubit, gamma = 0.
  static BiasMap illustrative(std::size_t qubits, double scale = 10.0) {
    BiasMap b;
    for (std::size_t k = 0; k < qubits; ++k) {
      b.alpha.push_back(k % 2 == 0 ? scale : -scale);
      b.beta.push_back(k < (qubits + 1) / 2 ? scale : -scale);
      b.gamma.push_back(0.0);
    }
    b.label = "illustrative, not paper-calibrated";
    return b;
  }
};

struct SweepGrid {
  double bt_min = 0.0, bt_max = 0.0;  // uA
  std::size_t bt_steps = 0;
  std::vector<double> b2_values;  // uA, ascending

  double bt_value(std::size_t k) const {
    if (k + 1 == bt_steps) return bt_max;
    return bt_min + (bt_max - bt_min) * static_cast<double>(k) / static_cast<double>(bt_steps - 1);
  }
  std::vector<double> bt_values() const {
    std::vector<double> v(bt_steps);
    for (std::size_t k = 0; k < bt_steps; ++k) v[k] = bt_value(k);
    return v;
  }
  std::size_t points() const { return bt_steps * b2_values.size(); }
};

struct PhysicsOptions {
  std::optional<double> temperature;  // mK; adds thermal columns to the sweep
  double degeneracy_rel_tol = 1e-9;
  double purity_tol = 1e-8;
};

struct OutputOptions {
  std::string csv;
  std::string plot_script;
};

struct Config {
  SpinHamiltonian system;
  BiasMap bias;
  bool bias_given = false;
  std::optional<SweepGrid> sweep;
  PhysicsOptions physics;
  OutputOptions output;
};

namespace detail {

using nlohmann::json;

class Reader {
 public:
  std::vector<std::string> issues;

  void error(const std::string& path, const std::string& message) { issues.push_back(path + ": " + message); }

  const json* object(const json& parent, const std::string& key, const std::string& path, bool required) {
    if (!parent.contains(key)) {
      if (required) error(join(path, key), "missing section");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      error(join(path, key), "expected an object");
      return nullptr;
    }
    return &v;
  }

  void known_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* key : keys) ok = ok || k == key;
      if (!ok) error(join(path, k), "unknown key");
    }
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) error(join(path, key), "missing key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      error(join(path, key), "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      error(join(path, key), "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::size_t> count(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.contains(key)) {
      if (required) error(join(path, key), "missing key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      error(join(path, key), "expected a non-negative integer");
      return std::nullopt;
    }
    return static_cast<std::size_t>(v.get<long long>());
  }

  std::optional<std::string> text(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      error(join(path, key), "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& key, const std::string& path,
                                             bool required, std::optional<std::size_t> length = std::nullopt) {
    if (!obj.contains(key)) {
      if (required) error(join(path, key), "missing key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    const std::string here = join(path, key);
    if (!v.is_array()) {
      error(here, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        error(here + "[" + std::to_string(i) + "]", "expected a finite number");
        ok = false;
        continue;
      }
      out.push_back(v[i].get<double>());
    }
    if (length && v.size() != *length) {
      error(here, "expected " + std::to_string(*length) + " entries, got " + std::to_string(v.size()));
      ok = false;
    }
    return ok ? std::optional(out) : std::nullopt;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

}  // namespace detail

/// Parses and validates a configuration document (JSON, comments allowed).
/// Qubit numbers in the document are 1-based. Throws ConfigError listing
/// every problem found.
inline Config parse_config_text(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  detail::Reader r;
  Config cfg;
  if (!doc.is_object()) throw ConfigError({"<root>: expected an object"});
  r.known_keys(doc, "", {"system", "bias_map", "sweep", "physics", "output"});

  std::size_t m = 0;
  if (const json* sys = r.object(doc, "system", "", true)) {
    r.known_keys(*sys, "system", {"qubits", "convention", "delta", "epsilon", "couplings"});
    if (auto q = r.count(*sys, "qubits", "system", true)) {
      if (*q < 1 || *q > kMaxQubits)
        r.error("system.qubits", "must be between 1 and " + std::to_string(kMaxQubits));
      else
        m = *q;
    }
    cfg.system.qubits = m;
    if (auto conv = r.text(*sys, "convention", "system")) {
      if (*conv == "main_text")
        cfg.system.convention = Convention::MainText;
      else if (*conv == "appendix")
        cfg.system.convention = Convention::Appendix;
      else
        r.error("system.convention", "expected \"main_text\" or \"appendix\"");
    }
    std::optional<std::size_t> len;
    if (m) len = m;
    if (auto d = r.numbers(*sys, "delta", "system", true, len)) cfg.system.delta = *d;
    if (auto e = r.numbers(*sys, "epsilon", "system", false, len))
      cfg.system.epsilon = *e;
    else
      cfg.system.epsilon.assign(m, 0.0);

    if (sys->contains("couplings")) {
      const json& c = sys->at("couplings");
      if (!c.is_object()) {
        r.error("system.couplings", "expected an object of \"i,j\": value entries");
      } else {
        static const std::regex key_form(R"(\s*(\d+)\s*,\s*(\d+)\s*)");
        for (const auto& [key, value] : c.items()) {
          const std::string here = "system.couplings.\"" + key + "\"";
          std::smatch match;
          if (!std::regex_match(key, match, key_form)) {
            r.error(here, "key must have the form \"i,j\"");
            continue;
          }
          const std::size_t i = std::stoul(match[1]), j = std::stoul(match[2]);
          if (i >= j) {
            r.error(here, "coupling keys need i < j");
            continue;
          }
          if (i < 1 || (m && j > m)) {
            r.error(here, "qubit index out of range 1.." + std::to_string(m));
            continue;
          }
          if (!value.is_number() || !std::isfinite(value.get<double>())) {
            r.error(here, "expected a finite number");
            continue;
          }
          cfg.system.couplings[{i - 1, j - 1}] = value.get<double>();
        }
      }
    }
  }

  if (const json* b = r.object(doc, "bias_map", "", false)) {
    r.known_keys(*b, "bias_map", {"alpha", "beta", "gamma", "label"});
    std::optional<std::size_t> len;
    if (m) len = m;
    auto a = r.numbers(*b, "alpha", "bias_map", true, len);
    auto be = r.numbers(*b, "beta", "bias_map", true, len);
    auto g = r.numbers(*b, "gamma", "bias_map", false, len);
    if (a && be) {
      cfg.bias.alpha = *a;
      cfg.bias.beta = *be;
      cfg.bias.gamma = g ? *g : std::vector<double>(a->size(), 0.0);
      cfg.bias_given = true;
    }
    cfg.bias.label = r.text(*b, "label", "bias_map").value_or("user");
  } else {
    cfg.bias = BiasMap::illustrative(m);
  }

  if (const json* s = r.object(doc, "sweep", "", false)) {
    r.known_keys(*s, "sweep", {"I_bT", "I_b2"});
    SweepGrid grid;
    bool ok = true;
    if (const json* bt = r.object(*s, "I_bT", "sweep", true)) {
      r.known_keys(*bt, "sweep.I_bT", {"min", "max", "steps"});
      auto lo = r.number(*bt, "min", "sweep.I_bT", true);
      auto hi = r.number(*bt, "max", "sweep.I_bT", true);
      auto steps = r.count(*bt, "steps", "sweep.I_bT", true);
      if (lo && hi && !(*lo < *hi)) {
        r.error("sweep.I_bT", "min must be less than max");
        ok = false;
      }
      if (steps && *steps < 2) {
        r.error("sweep.I_bT.steps", "must be at least 2");
        ok = false;
      }
      if (lo && hi && steps && ok) {
        grid.bt_min = *lo;
        grid.bt_max = *hi;
        grid.bt_steps = *steps;
      } else {
        ok = false;
      }
    } else {
      ok = false;
    }
    if (auto b2 = r.numbers(*s, "I_b2", "sweep", true)) {
      if (b2->empty()) {
        r.error("sweep.I_b2", "needs at least one value");
        ok = false;
      }
      grid.b2_values = *b2;
      std::sort(grid.b2_values.begin(), grid.b2_values.end());
      if (std::adjacent_find(grid.b2_values.begin(), grid.b2_values.end()) != grid.b2_values.end()) {
        r.error("sweep.I_b2", "values must be distinct");
        ok = false;
      }
    } else {
      ok = false;
    }
    if (ok) cfg.sweep = grid;
  }

  if (const json* p = r.object(doc, "physics", "", false)) {
    r.known_keys(*p, "physics", {"temperature_mK", "degeneracy_rel_tol", "purity_tol"});
    if (auto t = r.number(*p, "temperature_mK", "physics", false)) {
      if (*t <= 0.0)
        r.error("physics.temperature_mK", "must be positive");
      else
        cfg.physics.temperature = *t;
    }
    if (auto d = r.number(*p, "degeneracy_rel_tol", "physics", false)) {
      if (*d < 0.0 || *d >= 1.0)
        r.error("physics.degeneracy_rel_tol", "must be in [0, 1)");
      else
        cfg.physics.degeneracy_rel_tol = *d;
    }
    if (auto t = r.number(*p, "purity_tol", "physics", false)) {
      if (*t <= 0.0 || *t >= 0.5)
        r.error("physics.purity_tol", "must be in (0, 0.5)");
      else
        cfg.physics.purity_tol = *t;
    }
  }

  if (const json* o = r.object(doc, "output", "", false)) {
    r.known_keys(*o, "output", {"csv", "plot_script"});
    cfg.output.csv = r.text(*o, "csv", "output").value_or("");
    cfg.output.plot_script = r.text(*o, "plot_script", "output").value_or("");
  }

  if (!r.issues.empty()) throw ConfigError(r.issues);
  try {
    cfg.system.validate();
  } catch (const std::exception& e) {
    throw ConfigError({std::string("system: ") + e.what()});
  }
  return cfg;
}

inline Config parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

}  // namespace tanglescope
