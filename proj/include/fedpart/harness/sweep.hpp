#pragma once

// One-parameter sweeps. Each row echoes the full effective parameter set so a
// CSV line can be reproduced in isolation.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedpart/decomposition.hpp"
#include "fedpart/equilibrium.hpp"
#include "fedpart/harness/config.hpp"
#include "fedpart/harness/csv.hpp"
#include "fedpart/mechanism.hpp"

namespace fedpart::harness {

enum class Axis { Theta, Ad, Bd, Ae, Be, Sigma, Rho, S0, R0, S1, N, Xi };

inline constexpr std::pair<Axis, const char*> kAxisNames[] = {
    {Axis::Theta, "theta"}, {Axis::Ad, "a_d"},   {Axis::Bd, "b_d"}, {Axis::Ae, "a_e"},
    {Axis::Be, "b_e"},      {Axis::Sigma, "sigma"}, {Axis::Rho, "rho"}, {Axis::S0, "s0"},
    {Axis::R0, "r0"},       {Axis::S1, "s1"},    {Axis::N, "n"},     {Axis::Xi, "xi"},
};

inline const char* to_string(Axis a) {
  for (const auto& [axis, name] : kAxisNames)
    if (axis == a) return name;
  return "?";
}

inline Axis parse_axis(const std::string& name) {
  for (const auto& [axis, label] : kAxisNames)
    if (name == label) return axis;
  std::string valid;
  for (const auto& [axis, label] : kAxisNames) valid += std::string(valid.empty() ? "" : ", ") + label;
  throw UsageError("unknown sweep axis '" + name + "' (valid axes: " + valid + ")");
}

/// Grid used when no explicit values are given.
inline std::vector<double> default_values(Axis a) {
  auto range = [](double first, double step, int count) {
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(first + step * k);
    return v;
  };
  switch (a) {
    case Axis::Theta:
    case Axis::Ad:
    case Axis::Bd:
    case Axis::Ae:
    case Axis::Be: {
      std::vector<double> v;
      for (int k = 1; k <= 10; ++k) v.push_back(k / 10.0);
      return v;
    }
    case Axis::Sigma: return range(1e4, 1e4, 10);
    case Axis::Rho: return range(1.0, 1.0, 10);
    case Axis::S0: return range(0.0, 100.0, 10);
    case Axis::R0: return range(30.0, 5.0, 10);
    case Axis::S1: return {50, 100, 200, 400, 600, 800, 1000};
    case Axis::N: return range(2.0, 2.0, 8);
    case Axis::Xi: return range(1.0, 1.0, 5);
  }
  return {};
}

namespace detail {

inline std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw UsageError(std::string(what) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

/// Applies an axis value to the configuration (device-independent part).
inline ExperimentConfig with_axis(ExperimentConfig cfg, Axis axis, double v) {
  auto each_mech = [&](auto&& fn) {
    fn(cfg.defaults.mech);
    for (auto& p : cfg.devices) fn(p.mech);
  };
  switch (axis) {
    case Axis::Theta: each_mech([&](DeviceMechParams& m) { m.theta = v; }); break;
    case Axis::Ad: each_mech([&](DeviceMechParams& m) { m.a_d = v; }); break;
    case Axis::Bd: each_mech([&](DeviceMechParams& m) { m.b_d = v; }); break;
    case Axis::Ae: cfg.server.a_e = v; break;
    case Axis::Be: cfg.server.b_e = v; break;
    case Axis::Sigma: cfg.server.sigma = v; break;
    case Axis::Rho: cfg.server.rho = v; break;
    case Axis::S0: cfg.server.s0 = v; break;
    case Axis::R0: cfg.server.r0 = v; break;
    case Axis::S1: break;  // applied after materialization
    case Axis::N: {
      const std::size_t n = as_count(v, "n");
      if (cfg.generator) {
        cfg.generator->count = n;
      } else {
        const double fill = cfg.devices.empty() ? 500.0 : cfg.devices.back().profile.size;
        while (cfg.devices.size() < n) {
          Participant p = cfg.devices.empty() ? cfg.default_participant(0, fill) : cfg.devices.back();
          p.profile.id = cfg.devices.size();
          cfg.devices.push_back(p);
        }
        cfg.devices.resize(n);
      }
      break;
    }
    case Axis::Xi: cfg.solver.xi = as_count(v, "xi"); break;
  }
  return cfg;
}

}  // namespace detail

/// Outcome of one GPM evaluation under the configured solver mode.
struct GameEvaluation {
  double objective = 0.0;
  std::vector<double> marginals;
  DecisionVector threshold;
  DecisionVector sampled;
  bool alternative_optima = false;
  std::size_t xi = 1;
};

/// Direct mode: expected GPM optimum and its marginals. Decomposed mode:
/// realized full-game profit of the sampled decision and per-subset marginals.
inline GameEvaluation evaluate_game(const ExperimentConfig& cfg, const std::vector<DeviceProfile>& devices,
                                    std::uint64_t sample_seed) {
  GameEvaluation ev;
  ev.threshold = DecisionVector(devices.size());
  ev.sampled = DecisionVector(devices.size());
  if (devices.empty()) return ev;
  if (cfg.solver.mode == SolverMode::Direct) {
    const GpmSolution sol = solve_gpm(devices, cfg.game, cfg.solver.tol, cfg.solver.enumeration_cap);
    ev.objective = sol.total_expected_profit;
    ev.marginals = marginals(sol.distribution);
    ev.sampled = sample_decision(sol.distribution, sample_seed);
    ev.alternative_optima = sol.alternative_optima;
  } else {
    ev.xi = std::min(cfg.solver.xi, devices.size());
    const DecomposedResult dec = solve_decomposed(devices, cfg.game, ev.xi, sample_seed, cfg.solver.tol,
                                                  ExecutionMode::Serialized, cfg.solver.enumeration_cap);
    ev.objective = dec.reported_profit;
    for (const auto& sub : dec.subsets) {
      const auto m = marginals(sub.distribution);
      ev.marginals.insert(ev.marginals.end(), m.begin(), m.end());
      ev.alternative_optima = ev.alternative_optima || sub.alternative_optima;
    }
    ev.sampled = dec.decision;
  }
  ev.threshold = threshold_decision(ev.marginals);
  return ev;
}

struct SweepOptions {
  bool timing = false;  ///< add a wall_ms column (breaks byte-identical reruns)
};

inline std::vector<std::string> sweep_header(bool timing) {
  std::vector<std::string> h{"axis",     "value",   "rep",   "seed",  "n",       "xi",        "mode",
                             "alpha",    "err_a",   "err_b", "delta", "theta",   "a_d",       "b_d",
                             "a_e",      "b_e",     "sigma", "rho",   "s0",      "r0",        "horizon",
                             "sizes",    "ud_max",  "ue_max", "report", "accepted", "gpm_objective",
                             "alternative_optima", "marginals", "decision_threshold", "decision_sampled"};
  if (timing) h.push_back("wall_ms");
  return h;
}

/// One row per value per repetition. Stochastic configs run cfg.repetitions
/// repetitions and add a "mean" row per value averaging the numeric outputs.
inline CsvTable sweep(const ExperimentConfig& base, Axis axis, std::span<const double> values, std::uint64_t seed,
                      const SweepOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  CsvTable table(sweep_header(opts.timing));
  const std::size_t reps = base.stochastic() ? base.repetitions : 1;

  for (double v : values) {
    const ExperimentConfig cfg = detail::with_axis(base, axis, v);
    cfg.validate();
    double sum_ud = 0.0, sum_ue = 0.0, sum_obj = 0.0, sum_ms = 0.0;
    std::vector<double> sum_marg;
    std::vector<std::string> last;

    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::uint64_t rep_seed = reps == 1 ? seed : derive_seed(seed, rep);
      auto participants = cfg.materialize(derive_seed(rep_seed, 0));
      if (axis == Axis::S1) {
        if (participants.empty()) throw UsageError("axis s1 needs at least one device");
        participants[0].profile.size = v;
      }
      const auto t0 = clock::now();
      const DeviceMechParams mech = participants.empty() ? cfg.defaults.mech : participants[0].mech;
      const MechanismOutcome m = evaluate_mechanism(mech, cfg.server);
      const auto devices = profiles(participants);
      const GameEvaluation ev = evaluate_game(cfg, devices, rep_seed);
      const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();

      std::vector<double> sizes;
      for (const auto& d : devices) sizes.push_back(d.size);
      std::vector<std::string> row{to_string(axis),
                                   format_number(v),
                                   std::to_string(rep),
                                   std::to_string(rep_seed),
                                   std::to_string(devices.size()),
                                   std::to_string(cfg.solver.mode == SolverMode::Direct ? 1 : ev.xi),
                                   to_string(cfg.solver.mode),
                                   format_number(cfg.game.alpha),
                                   format_number(cfg.game.err_a),
                                   format_number(cfg.game.err_b),
                                   format_number(cfg.game.delta),
                                   format_number(mech.theta),
                                   format_number(mech.a_d),
                                   format_number(mech.b_d),
                                   format_number(cfg.server.a_e),
                                   format_number(cfg.server.b_e),
                                   format_number(cfg.server.sigma),
                                   format_number(cfg.server.rho),
                                   format_number(cfg.server.s0),
                                   format_number(cfg.server.r0),
                                   format_number(cfg.server.horizon),
                                   join_numbers(sizes),
                                   format_number(m.device_utility),
                                   format_number(m.server_utility),
                                   format_number(m.report),
                                   m.accepted ? "1" : "0",
                                   format_number(ev.objective),
                                   ev.alternative_optima ? "1" : "0",
                                   join_numbers(ev.marginals),
                                   ev.threshold.to_string(),
                                   ev.sampled.to_string()};
      if (opts.timing) row.push_back(format_number(ms));
      table.add_row(row);

      sum_ud += m.device_utility;
      sum_ue += m.server_utility;
      sum_obj += ev.objective;
      sum_ms += ms;
      sum_marg.resize(std::max(sum_marg.size(), ev.marginals.size()), 0.0);
      for (std::size_t i = 0; i < ev.marginals.size(); ++i) sum_marg[i] += ev.marginals[i];
      last = std::move(row);
    }

    if (reps > 1) {
      const double r = static_cast<double>(reps);
      for (auto& x : sum_marg) x /= r;
      auto row = last;
      row[table.column("rep")] = "mean";
      row[table.column("seed")] = std::to_string(seed);
      row[table.column("sizes")] = "";
      row[table.column("ud_max")] = format_number(sum_ud / r);
      row[table.column("ue_max")] = format_number(sum_ue / r);
      row[table.column("gpm_objective")] = format_number(sum_obj / r);
      row[table.column("alternative_optima")] = "";
      row[table.column("marginals")] = join_numbers(sum_marg);
      row[table.column("decision_threshold")] = threshold_decision(sum_marg).to_string();
      row[table.column("decision_sampled")] = "";
      if (opts.timing) row[table.column("wall_ms")] = format_number(sum_ms / r);
      table.add_row(row);
    }
  }
  return table;
}

}  // namespace fedpart::harness
