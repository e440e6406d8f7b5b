#pragma once

// Simulation of one round of the server/device interaction:
//   1. the server publishes the reward rule; each device computes its best
//      report and either sends it or stays silent,
//   2. the server solves the GPM (or its decomposition) over the reporting devices,
//   3. the server returns the distribution to the reporting devices,
//   4. the devices draw their decisions from it,
//   5. the devices report their decisions back.
// Every reporting device reads its entry of one shared joint draw: the seed
// plays the role of the correlation signal, so decisions are jointly
// distributed exactly as G.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedpart/decomposition.hpp"
#include "fedpart/equilibrium.hpp"
#include "fedpart/harness/config.hpp"
#include "fedpart/harness/csv.hpp"
#include "fedpart/mechanism.hpp"

namespace fedpart::harness {

struct ProtocolEvent {
  std::size_t seq = 0;
  int step = 0;
  std::string actor;                  ///< "server" or "device:<i>"
  std::optional<std::size_t> device;  ///< device the event concerns, if any
  std::string summary;
};

struct ProtocolTrace {
  std::vector<ProtocolEvent> events;

  std::vector<ProtocolEvent> for_device(std::size_t i) const {
    std::vector<ProtocolEvent> out;
    for (const auto& e : events)
      if (e.device == i) out.push_back(e);
    return out;
  }

  /// Sequence numbers strictly increase and steps never go backwards.
  bool well_ordered() const {
    for (std::size_t k = 1; k < events.size(); ++k)
      if (events[k].seq <= events[k - 1].seq || events[k].step < events[k - 1].step) return false;
    return true;
  }
};

struct ProtocolResult {
  ProtocolTrace trace;
  /// One entry per configured device; silent devices are 0.
  DecisionVector decision;
  double total_profit = 0.0;
  std::vector<Participant> participants;
  std::vector<MechanismOutcome> mechanism;
  std::vector<bool> accepted;
  /// Marginal participation per configured device; silent devices are 0.
  std::vector<double> marginals;
  double expected_profit = 0.0;
  bool alternative_optima = false;
};

namespace detail {

class TraceWriter {
 public:
  explicit TraceWriter(ProtocolTrace& trace) : trace_(trace) {}

  void server(int step, std::string summary, std::optional<std::size_t> device = std::nullopt) {
    trace_.events.push_back({next_++, step, "server", device, std::move(summary)});
  }
  void device(int step, std::size_t i, std::string summary) {
    trace_.events.push_back({next_++, step, "device:" + std::to_string(i), i, std::move(summary)});
  }

 private:
  ProtocolTrace& trace_;
  std::size_t next_ = 0;
};

}  // namespace detail

/// Runs the round for the devices in `participants`. `seed` drives the joint draw.
inline ProtocolResult run_protocol(const ExperimentConfig& cfg, std::vector<Participant> participants,
                                   std::uint64_t seed) {
  ProtocolResult res;
  detail::TraceWriter log(res.trace);
  const std::size_t n = participants.size();
  res.decision = DecisionVector(n);
  res.accepted.assign(n, false);
  res.marginals.assign(n, 0.0);
  res.mechanism.resize(n);

  // Step 1: rule publication, best responses, reports.
  std::vector<std::size_t> reporting;
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = participants[i];
    log.server(1,
               "publish rule r(s) = " + format_number(cfg.server.r0) + " - " +
                   format_number(cfg.server.a_e / (2.0 * cfg.server.rho)) + " * theta * s",
               i);
    const MechanismOutcome m = evaluate_mechanism(p.mech, cfg.server);
    res.mechanism[i] = m;
    if (!m.accepted) {
      log.device(1, i, "silent (best report " + format_number(m.report) + ", utility " +
                           format_number(m.device_utility) + ")");
      continue;
    }
    res.accepted[i] = true;
    p.profile.size = m.report;
    reporting.push_back(i);
    log.device(1, i, "report s = " + format_number(m.report));
    std::string receipt = "receive s = " + format_number(m.report);
    try {
      const double theta_hat = infer_theta(m.report, cfg.server, p.mech.a_d);
      receipt += ", inferred theta " + format_number(theta_hat) + ", reward r = " +
                 format_number(cfg.server.r0 - cfg.server.a_e * theta_hat * m.report / (2.0 * cfg.server.rho));
    } catch (const UsageError&) {
      receipt += ", theta not identifiable from the report";
    }
    log.server(1, receipt, i);
  }
  res.participants = participants;

  if (reporting.empty()) {
    if (n > 0) log.server(2, "no reports received; empty game");
    return res;
  }

  std::vector<DeviceProfile> game;
  for (auto i : reporting) game.push_back(participants[i].profile);

  // Step 2: solve.
  DecisionVector local_decision;
  std::vector<double> local_marginals;
  if (cfg.solver.mode == SolverMode::Direct) {
    const GpmSolution sol = solve_gpm(game, cfg.game, cfg.solver.tol, cfg.solver.enumeration_cap);
    log.server(2, "solve GPM over " + std::to_string(game.size()) + " devices, expected profit " +
                      format_number(sol.total_expected_profit));
    local_marginals = marginals(sol.distribution);
    res.expected_profit = sol.total_expected_profit;
    res.alternative_optima = sol.alternative_optima;
    local_decision = sample_decision(sol.distribution, seed);
  } else {
    const std::size_t xi = std::min(cfg.solver.xi, game.size());
    const DecomposedResult dec =
        solve_decomposed(game, cfg.game, xi, seed, cfg.solver.tol, ExecutionMode::Serialized,
                         cfg.solver.enumeration_cap);
    log.server(2, "solve " + std::to_string(xi) + " SGPM subsets over " + std::to_string(game.size()) + " devices");
    for (const auto& sub : dec.subsets) {
      const auto m = marginals(sub.distribution);
      local_marginals.insert(local_marginals.end(), m.begin(), m.end());
      res.expected_profit += sub.total_expected_profit;
      res.alternative_optima = res.alternative_optima || sub.alternative_optima;
    }
    local_decision = dec.decision;
  }

  // Steps 3-5, in step order across devices.
  for (auto i : reporting) log.server(3, "send distribution", i);
  for (std::size_t t = 0; t < reporting.size(); ++t)
    log.device(4, reporting[t], "draw p = " + std::to_string(local_decision[t]));
  for (std::size_t t = 0; t < reporting.size(); ++t)
    log.device(5, reporting[t], "report p = " + std::to_string(local_decision[t]));

  for (std::size_t t = 0; t < reporting.size(); ++t) {
    res.decision.set(reporting[t], local_decision[t]);
    res.marginals[reporting[t]] = local_marginals[t];
  }
  res.total_profit = total_profit(local_decision, game, cfg.game);
  if (res.total_profit == 0.0) res.total_profit = 0.0;
  return res;
}

inline ProtocolResult run_protocol(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_protocol(cfg, cfg.materialize(derive_seed(seed, 0)), seed);
}

inline CsvTable trace_table(const ProtocolTrace& trace) {
  CsvTable t({"seq", "step", "actor", "device", "summary"});
  for (const auto& e : trace.events)
    t.add_row({std::to_string(e.seq), std::to_string(e.step), e.actor,
               e.device ? std::to_string(*e.device) : std::string(), e.summary});
  return t;
}

}  // namespace fedpart::harness
