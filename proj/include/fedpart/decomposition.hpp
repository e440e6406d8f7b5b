#pragma once

// Subset decomposition of the GPM. Devices are split into xi contiguous
// chunks in registration (communication) order and each chunk solves its own
// GPM with the incentive computed over chunk members only. The global
// decision is the concatenation of independent per-chunk samples, and the
// realized profit is re-evaluated in the full coupled game, where the pooled
// size spans every participant across chunks.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fedpart/equilibrium.hpp"
#include "fedpart/game_model.hpp"
#include "fedpart/random.hpp"

namespace fedpart {

struct PartitionSpec {
  std::size_t xi = 0;
  std::size_t max_subset_size = 0;
  std::vector<std::vector<std::size_t>> assignment;

  void validate(std::size_t n) const {
    if (assignment.size() != xi) throw UsageError("partition lists do not match xi");
    std::vector<bool> seen(n, false);
    for (const auto& chunk : assignment) {
      if (chunk.size() > max_subset_size) throw UsageError("partition chunk exceeds max_subset_size");
      for (auto i : chunk) {
        if (i >= n || seen[i]) throw UsageError("partition lists must be disjoint and in range");
        seen[i] = true;
      }
    }
    for (bool b : seen)
      if (!b) throw UsageError("partition does not cover every device");
  }
};

/// Balanced contiguous chunks; the first n mod xi chunks get one extra device.
inline PartitionSpec partition(std::size_t n, std::size_t xi) {
  if (xi < 1 || xi > n)
    throw UsageError("xi must satisfy 1 <= xi <= n (xi=" + std::to_string(xi) + ", n=" + std::to_string(n) + ")");
  PartitionSpec spec;
  spec.xi = xi;
  const std::size_t base = n / xi, extra = n % xi;
  std::size_t next = 0;
  for (std::size_t j = 0; j < xi; ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    std::vector<std::size_t> chunk(len);
    for (std::size_t t = 0; t < len; ++t) chunk[t] = next++;
    spec.max_subset_size = std::max(spec.max_subset_size, len);
    spec.assignment.push_back(std::move(chunk));
  }
  return spec;
}

inline PartitionSpec partition(std::span<const DeviceProfile> devices, std::size_t xi) {
  return partition(devices.size(), xi);
}

/// GPM restricted to `subset`; the incentive sees subset members only.
inline GpmSolution solve_sgpm(std::span<const DeviceProfile> subset, const GameParams& g, const Tolerances& tol = {},
                              std::size_t cap = kDefaultEnumerationCap) {
  if (subset.empty()) throw UsageError("SGPM subset must be nonempty");
  return solve_gpm(subset, g, tol, cap);
}

enum class ExecutionMode {
  Serialized,  ///< subsets solved one after another (timing mode used for comparisons)
  Parallel     ///< subsets solved concurrently; results merged in subset order
};

struct DecompositionTiming {
  std::vector<double> subset_ms;
  double total_ms = 0.0;
};

struct DecomposedResult {
  PartitionSpec partition;
  std::vector<GpmSolution> subsets;
  DecisionVector decision;
  /// Total profit of `decision` evaluated in the full coupled game.
  double reported_profit = 0.0;
  DecompositionTiming timing;
};

inline DecomposedResult solve_decomposed(std::span<const DeviceProfile> devices, const GameParams& g, std::size_t xi,
                                         std::uint64_t seed, const Tolerances& tol = {},
                                         ExecutionMode mode = ExecutionMode::Serialized,
                                         std::size_t cap = kDefaultEnumerationCap) {
  using clock = std::chrono::steady_clock;
  DecomposedResult out;
  out.partition = partition(devices, xi);
  const auto& chunks = out.partition.assignment;

  auto members = [&](std::size_t j) {
    std::vector<DeviceProfile> sub;
    sub.reserve(chunks[j].size());
    for (auto i : chunks[j]) sub.push_back(devices[i]);
    return sub;
  };
  auto timed_solve = [&](std::size_t j) {
    const auto sub = members(j);
    const auto t0 = clock::now();
    GpmSolution sol = solve_sgpm(sub, g, tol, cap);
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return std::pair<GpmSolution, double>(std::move(sol), ms);
  };

  const auto start = clock::now();
  out.subsets.resize(chunks.size());
  out.timing.subset_ms.resize(chunks.size());
  if (mode == ExecutionMode::Serialized) {
    for (std::size_t j = 0; j < chunks.size(); ++j) std::tie(out.subsets[j], out.timing.subset_ms[j]) = timed_solve(j);
  } else {
    std::vector<std::future<std::pair<GpmSolution, double>>> pending;
    for (std::size_t j = 0; j < chunks.size(); ++j) pending.push_back(std::async(std::launch::async, timed_solve, j));
    for (std::size_t j = 0; j < chunks.size(); ++j) std::tie(out.subsets[j], out.timing.subset_ms[j]) = pending[j].get();
  }
  out.timing.total_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();

  Rng rng(seed);
  out.decision = DecisionVector(devices.size());
  for (std::size_t j = 0; j < chunks.size(); ++j) {
    const DecisionVector local = sample_decision(out.subsets[j].distribution, rng);
    for (std::size_t t = 0; t < chunks[j].size(); ++t) out.decision.set(chunks[j][t], local[t]);
  }
  out.reported_profit = total_profit(out.decision, devices, g);
  return out;
}

struct CostScalingRow {
  std::size_t n = 0;
  double direct_ms = 0.0;
  double decomposed_ms = 0.0;
  std::size_t xi = 0;
  std::size_t max_subset_size = 0;
};

/// Wall-clock of the direct and decomposed solvers for each n, sizes drawn
/// from {50, 500} with equal probability. Times are averaged over `repetitions`.
inline std::vector<CostScalingRow> cost_scaling_report(std::span<const std::size_t> n_list,
                                                       const std::function<std::size_t(std::size_t)>& xi_rule,
                                                       std::uint64_t seed = 0, std::size_t repetitions = 1,
                                                       const GameParams& g = {}, const Tolerances& tol = {}) {
  using clock = std::chrono::steady_clock;
  std::vector<CostScalingRow> rows;
  for (std::size_t n : n_list) {
    CostScalingRow row;
    row.n = n;
    row.xi = xi_rule(n);
    row.max_subset_size = partition(n, row.xi).max_subset_size;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      Rng rng(derive_seed(seed, n * 1000 + rep));
      std::vector<double> sizes(n);
      for (auto& s : sizes) s = rng.uniform01() < 0.5 ? 50.0 : 500.0;
      const auto devices = make_devices(sizes);

      auto t0 = clock::now();
      (void)solve_gpm(devices, g, tol);
      row.direct_ms += std::chrono::duration<double, std::milli>(clock::now() - t0).count();

      t0 = clock::now();
      (void)solve_decomposed(devices, g, row.xi, rng.next_u64(), tol);
      row.decomposed_ms += std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }
    row.direct_ms /= static_cast<double>(repetitions);
    row.decomposed_ms /= static_cast<double>(repetitions);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fedpart
