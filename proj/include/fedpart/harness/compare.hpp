#pragma once

// Direct vs decomposed solver comparison over a list of device counts.

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "fedpart/decomposition.hpp"
#include "fedpart/equilibrium.hpp"
#include "fedpart/harness/config.hpp"
#include "fedpart/harness/csv.hpp"

namespace fedpart::harness {

struct CompareRow {
  std::size_t n = 0;
  std::size_t repetitions = 0;
  double direct_profit = 0.0;    ///< mean GPM optimum (expected profit)
  double improved_profit = 0.0;  ///< mean realized full-game profit of the decomposed decision
  double direct_ms = 0.0;
  double improved_ms = 0.0;
};

/// Devices for count `n`: the first n configured devices when the config
/// lists at least n (one repetition), otherwise independent draws from the
/// configured generator, or from {50, 500} with equal odds if none is given.
inline std::vector<CompareRow> compare_solvers(const ExperimentConfig& cfg, std::span<const std::size_t> n_list,
                                               std::size_t xi, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  std::vector<CompareRow> rows;
  for (std::size_t n : n_list) {
    if (n == 0) throw UsageError("compare needs n >= 1");
    check_enumeration_cap(n, cfg.solver.enumeration_cap);
    const bool fixed = !cfg.generator && cfg.devices.size() >= n;
    ExperimentConfig run = cfg;
    if (!fixed) {
      DeviceGenerator gen = cfg.generator.value_or(DeviceGenerator{});
      gen.count = n;
      run.generator = gen;
      run.devices.clear();
    }
    const std::size_t reps = fixed ? 1 : cfg.repetitions;

    CompareRow row;
    row.n = n;
    row.repetitions = reps;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::uint64_t rep_seed = derive_seed(derive_seed(seed, n), rep);
      auto participants = run.materialize(derive_seed(rep_seed, 0));
      participants.resize(n);
      const auto devices = profiles(participants);

      auto t0 = clock::now();
      const GpmSolution direct = solve_gpm(devices, cfg.game, cfg.solver.tol, cfg.solver.enumeration_cap);
      row.direct_ms += std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      row.direct_profit += direct.total_expected_profit;

      t0 = clock::now();
      const DecomposedResult dec = solve_decomposed(devices, cfg.game, std::min(xi, n), rep_seed, cfg.solver.tol,
                                                    ExecutionMode::Serialized, cfg.solver.enumeration_cap);
      row.improved_ms += std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      row.improved_profit += dec.reported_profit;
    }
    const double r = static_cast<double>(reps);
    row.direct_profit /= r;
    row.improved_profit /= r;
    row.direct_ms /= r;
    row.improved_ms /= r;
    rows.push_back(row);
  }
  return rows;
}

inline CsvTable compare_table(const std::vector<CompareRow>& rows, bool timing) {
  std::vector<std::string> header{"n", "repetitions", "direct_profit", "improved_profit"};
  if (timing) {
    header.push_back("direct_ms");
    header.push_back("improved_ms");
  }
  CsvTable t(header);
  for (const auto& r : rows) {
    std::vector<std::string> row{std::to_string(r.n), std::to_string(r.repetitions), format_number(r.direct_profit),
                                 format_number(r.improved_profit)};
    if (timing) {
      row.push_back(format_number(r.direct_ms));
      row.push_back(format_number(r.improved_ms));
    }
    t.add_row(row);
  }
  return t;
}

}  // namespace fedpart::harness
