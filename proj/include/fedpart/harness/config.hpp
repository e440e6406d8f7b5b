#pragma once

// Experiment configuration: one JSON document, unknown keys rejected.
//
// {
//   "devices":   [ {"size": 500, "channel_cost": 3.5e5, "beta": 1e-3, "gamma": 1e-5,
//                   "theta": 0.5, "a_d": 1, "b_d": 1}, ... ],
//   "generator": {"count": 8, "sizes": [50, 500], "probabilities": [0.5, 0.5]},
//   "device_defaults": {"channel_cost": 3.5e5, "beta": 1e-3, "gamma": 1e-5,
//                       "theta": 0.5, "a_d": 1, "b_d": 1},
//   "game":   {"alpha": 10, "err_a": 13.2, "err_b": 0.7, "delta": 1e-3},
//   "server": {"a_e": 1, "b_e": 1, "sigma": 1e5, "rho": 10, "s0": 500, "r0": 50, "horizon": 1},
//   "solver": {"mode": "direct", "xi": 2, "feas_tol": 1e-8, "cs_tol": 1e-8, "gap_tol": 1e-7,
//              "ce_tol": 1e-7, "enumeration_cap": 20},
//   "repetitions": 30,
//   "output": {"path": "out.csv", "seed": 42}
// }
//
// "devices" and "generator" are mutually exclusive; every field is optional
// and falls back to the defaults shown.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedpart/error.hpp"
#include "fedpart/game_model.hpp"
#include "fedpart/lp.hpp"
#include "fedpart/mechanism.hpp"
#include "fedpart/random.hpp"

namespace fedpart::harness {

using Json = nlohmann::json;

/// A device as seen by the harness: public profile plus private mechanism parameters.
struct Participant {
  DeviceProfile profile;
  DeviceMechParams mech;
};

struct DeviceDefaults {
  double channel_cost = 3.5e5;
  double beta = 1e-3;
  double gamma = 1e-5;
  DeviceMechParams mech;
};

/// Draws each device size independently from `sizes` with `probabilities`.
struct DeviceGenerator {
  std::size_t count = 0;
  std::vector<double> sizes{50.0, 500.0};
  std::vector<double> probabilities{0.5, 0.5};

  void validate() const {
    if (sizes.empty() || sizes.size() != probabilities.size())
      throw UsageError("generator needs matching, nonempty 'sizes' and 'probabilities'");
    double sum = 0.0;
    for (double p : probabilities) {
      if (!(p >= 0.0)) throw UsageError("generator probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw UsageError("generator probabilities must sum to 1");
    for (double s : sizes)
      if (!(s >= 0.0)) throw UsageError("generator sizes must be >= 0");
  }

  double draw(Rng& rng) const {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      cum += probabilities[k];
      if (u < cum) return sizes[k];
    }
    return sizes.back();
  }
};

enum class SolverMode { Direct, Decomposed };

struct SolverConfig {
  SolverMode mode = SolverMode::Direct;
  std::size_t xi = 2;
  Tolerances tol;
  double ce_tol = 1e-7;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

inline const char* to_string(SolverMode m) { return m == SolverMode::Direct ? "direct" : "decomposed"; }

struct ExperimentConfig {
  std::vector<Participant> devices;
  std::optional<DeviceGenerator> generator;
  DeviceDefaults defaults;
  GameParams game;
  ServerMechParams server;
  SolverConfig solver;
  std::size_t repetitions = 30;
  std::optional<std::string> output_path;
  std::optional<std::uint64_t> seed;

  bool stochastic() const noexcept { return generator.has_value(); }

  std::size_t device_count() const noexcept { return generator ? generator->count : devices.size(); }

  void validate() const {
    game.validate();
    server.validate();
    defaults.mech.validate();
    if (generator) generator->validate();
    for (const auto& p : devices) {
      p.profile.validate();
      p.mech.validate();
    }
    if (repetitions == 0) throw UsageError("repetitions must be >= 1");
    if (solver.xi == 0) throw UsageError("solver.xi must be >= 1");
    if (stochastic() && !seed) throw UsageError("a seed is required when devices are generated randomly");
  }

  std::uint64_t effective_seed() const noexcept { return seed.value_or(0); }

  /// Concrete participant list. Generated sizes come from `stream_seed`.
  std::vector<Participant> materialize(std::uint64_t stream_seed) const {
    if (!generator) return devices;
    Rng rng(stream_seed);
    std::vector<Participant> out;
    out.reserve(generator->count);
    for (std::size_t i = 0; i < generator->count; ++i) {
      Participant p;
      p.profile = {i, generator->draw(rng), defaults.channel_cost, defaults.beta, defaults.gamma};
      p.mech = defaults.mech;
      out.push_back(p);
    }
    return out;
  }

  /// A participant built from the defaults, used when growing a device list.
  Participant default_participant(std::size_t id, double size) const {
    return {{id, size, defaults.channel_cost, defaults.beta, defaults.gamma}, defaults.mech};
  }
};

inline std::vector<DeviceProfile> profiles(const std::vector<Participant>& ps) {
  std::vector<DeviceProfile> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(p.profile);
  return out;
}

namespace detail {

inline void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw UsageError("config: '" + where + "' must be an object");
}

inline void reject_unknown(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) ok = true;
    if (!ok) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      throw UsageError("config: unknown key '" + item.key() + "' in " + where + " (allowed: " + list + ")");
    }
  }
}

inline void read_number(const Json& j, const char* key, double& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) throw UsageError("config: " + where + "." + key + " must be a number");
  out = j.at(key).get<double>();
}

inline void read_count(const Json& j, const char* key, std::size_t& out, const std::string& where) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw UsageError("config: " + where + "." + key + " must be a nonnegative integer");
  out = v.get<std::size_t>();
}

inline std::vector<double> read_number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw UsageError("config: " + where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw UsageError("config: " + where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline void read_mech(const Json& j, DeviceMechParams& m, const std::string& where) {
  read_number(j, "theta", m.theta, where);
  read_number(j, "a_d", m.a_d, where);
  read_number(j, "b_d", m.b_d, where);
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& root) {
  using namespace detail;
  reject_unknown(root, "config",
                 {"devices", "generator", "device_defaults", "game", "server", "solver", "repetitions", "output"});
  ExperimentConfig cfg;

  if (root.contains("device_defaults")) {
    const auto& j = root.at("device_defaults");
    reject_unknown(j, "device_defaults", {"channel_cost", "beta", "gamma", "theta", "a_d", "b_d"});
    read_number(j, "channel_cost", cfg.defaults.channel_cost, "device_defaults");
    read_number(j, "beta", cfg.defaults.beta, "device_defaults");
    read_number(j, "gamma", cfg.defaults.gamma, "device_defaults");
    read_mech(j, cfg.defaults.mech, "device_defaults");
  }

  if (root.contains("devices") && root.contains("generator"))
    throw UsageError("config: 'devices' and 'generator' are mutually exclusive");

  if (root.contains("devices")) {
    const auto& list = root.at("devices");
    if (!list.is_array()) throw UsageError("config: 'devices' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& j = list[i];
      const std::string where = "devices[" + std::to_string(i) + "]";
      reject_unknown(j, where, {"id", "size", "channel_cost", "beta", "gamma", "theta", "a_d", "b_d"});
      if (!j.contains("size")) throw UsageError("config: " + where + ".size is required");
      Participant p = cfg.default_participant(i, 0.0);
      read_count(j, "id", p.profile.id, where);
      read_number(j, "size", p.profile.size, where);
      read_number(j, "channel_cost", p.profile.channel_cost, where);
      read_number(j, "beta", p.profile.beta, where);
      read_number(j, "gamma", p.profile.gamma, where);
      read_mech(j, p.mech, where);
      cfg.devices.push_back(p);
    }
  }

  if (root.contains("generator")) {
    const auto& j = root.at("generator");
    reject_unknown(j, "generator", {"count", "sizes", "probabilities"});
    DeviceGenerator gen;
    read_count(j, "count", gen.count, "generator");
    if (j.contains("sizes")) gen.sizes = read_number_list(j.at("sizes"), "generator.sizes");
    if (j.contains("probabilities"))
      gen.probabilities = read_number_list(j.at("probabilities"), "generator.probabilities");
    cfg.generator = gen;
  }

  if (root.contains("game")) {
    const auto& j = root.at("game");
    reject_unknown(j, "game", {"alpha", "err_a", "err_b", "delta"});
    read_number(j, "alpha", cfg.game.alpha, "game");
    read_number(j, "err_a", cfg.game.err_a, "game");
    read_number(j, "err_b", cfg.game.err_b, "game");
    read_number(j, "delta", cfg.game.delta, "game");
  }

  if (root.contains("server")) {
    const auto& j = root.at("server");
    reject_unknown(j, "server", {"a_e", "b_e", "sigma", "rho", "s0", "r0", "horizon"});
    read_number(j, "a_e", cfg.server.a_e, "server");
    read_number(j, "b_e", cfg.server.b_e, "server");
    read_number(j, "sigma", cfg.server.sigma, "server");
    read_number(j, "rho", cfg.server.rho, "server");
    read_number(j, "s0", cfg.server.s0, "server");
    read_number(j, "r0", cfg.server.r0, "server");
    read_number(j, "horizon", cfg.server.horizon, "server");
  }

  if (root.contains("solver")) {
    const auto& j = root.at("solver");
    reject_unknown(j, "solver", {"mode", "xi", "feas_tol", "cs_tol", "gap_tol", "ce_tol", "enumeration_cap"});
    if (j.contains("mode")) {
      const auto& m = j.at("mode");
      if (m == "direct")
        cfg.solver.mode = SolverMode::Direct;
      else if (m == "decomposed")
        cfg.solver.mode = SolverMode::Decomposed;
      else
        throw UsageError("config: solver.mode must be \"direct\" or \"decomposed\"");
    }
    read_count(j, "xi", cfg.solver.xi, "solver");
    read_number(j, "feas_tol", cfg.solver.tol.feas, "solver");
    read_number(j, "cs_tol", cfg.solver.tol.cs, "solver");
    read_number(j, "gap_tol", cfg.solver.tol.gap, "solver");
    read_number(j, "ce_tol", cfg.solver.ce_tol, "solver");
    read_count(j, "enumeration_cap", cfg.solver.enumeration_cap, "solver");
  }

  read_count(root, "repetitions", cfg.repetitions, "config");

  if (root.contains("output")) {
    const auto& j = root.at("output");
    reject_unknown(j, "output", {"path", "seed"});
    if (j.contains("path")) {
      if (!j.at("path").is_string()) throw UsageError("config: output.path must be a string");
      cfg.output_path = j.at("path").get<std::string>();
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw UsageError("config: output.seed must be an unsigned integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace fedpart::harness
