#pragma once

// Global Profit Maximization over the correlated-equilibrium polytope of the
// participation game. Variables are the 2^n outcome probabilities G(p) in
// canonical order; rows are the normalization equality and, for each device i
// and each ordered pair (recommended, deviation) of strategies, the
// obedience inequality
//
//   sum_{p: p_i = rec} G(p) * (V_i(p) - V_i(p with p_i := dev)) >= 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedpart/error.hpp"
#include "fedpart/game_model.hpp"
#include "fedpart/lp.hpp"
#include "fedpart/random.hpp"

namespace fedpart {

/// Probability mass over the 2^n joint outcomes, canonical order.
struct CorrelatedDistribution {
  std::size_t n = 0;
  std::vector<double> probabilities;

  static CorrelatedDistribution point_mass(const DecisionVector& p) {
    CorrelatedDistribution d{p.size(), std::vector<double>(std::size_t{1} << p.size(), 0.0)};
    d.probabilities[p.to_index()] = 1.0;
    return d;
  }

  static CorrelatedDistribution uniform(std::size_t n) {
    const std::size_t m = std::size_t{1} << n;
    return {n, std::vector<double>(m, 1.0 / static_cast<double>(m))};
  }

  void validate(double tol = 1e-8) const {
    if (probabilities.size() != (std::size_t{1} << n))
      throw UsageError("distribution over " + std::to_string(n) + " devices needs " +
                       std::to_string(std::size_t{1} << n) + " entries, got " +
                       std::to_string(probabilities.size()));
    double sum = 0.0;
    for (double v : probabilities) {
      if (!(v >= -tol)) throw UsageError("distribution has a negative or NaN entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) throw UsageError("distribution sums to " + std::to_string(sum));
  }
};

/// One obedience row: device `device` told to play `recommended` considers `deviation`.
struct CeRowTag {
  std::size_t device = 0;
  int recommended = 0;
  int deviation = 0;

  bool trivial() const noexcept { return recommended == deviation; }
};

/// The assembled GPM program. `lp` holds the normalization row first and
/// then all 4n obedience rows, including the 2n trivial ones (all-zero
/// coefficients); nonnegativity is carried by the variable bounds.
struct GpmProgram {
  std::size_t n = 0;
  LinearProgram lp;
  std::vector<CeRowTag> tags;  ///< tags[k] describes lp.constraints[k + 1]

  /// 2^n bounds + 4n obedience rows + 1 normalization.
  std::size_t raw_constraint_count() const noexcept { return lp.num_vars + lp.constraints.size(); }

  /// The program actually handed to the solver: trivial rows removed.
  LinearProgram filtered() const {
    LinearProgram out;
    out.num_vars = lp.num_vars;
    out.objective = lp.objective;
    out.constraints.push_back(lp.constraints.front());
    for (std::size_t k = 0; k < tags.size(); ++k)
      if (!tags[k].trivial()) out.constraints.push_back(lp.constraints[k + 1]);
    return out;
  }

  std::size_t filtered_constraint_count() const noexcept { return lp.num_vars + 1 + 2 * n; }
};

inline GpmProgram build_gpm(const ProfitTable& table) {
  const std::size_t n = table.devices();
  if (n == 0) throw UsageError("GPM needs at least one device");
  const std::size_t m = table.outcomes();

  GpmProgram prog;
  prog.n = n;
  prog.lp.num_vars = m;
  prog.lp.objective.resize(m);
  for (std::size_t k = 0; k < m; ++k) prog.lp.objective[k] = table.total(k);

  prog.lp.constraints.push_back({std::vector<double>(m, 1.0), Sense::Equal, 1.0});
  for (std::size_t i = 0; i < n; ++i)
    for (int rec = 0; rec <= 1; ++rec)
      for (int dev = 0; dev <= 1; ++dev) {
        std::vector<double> row(m, 0.0);
        if (rec != dev)
          for (std::size_t k = 0; k < m; ++k) {
            if (static_cast<int>((k >> i) & 1U) != rec) continue;
            const std::size_t flipped = k ^ (std::size_t{1} << i);
            row[k] = table.at(k, i) - table.at(flipped, i);
          }
        prog.lp.constraints.push_back({std::move(row), Sense::GreaterEqual, 0.0});
        prog.tags.push_back({i, rec, dev});
      }
  return prog;
}

inline GpmProgram build_gpm(std::span<const DeviceProfile> devices, const GameParams& g,
                            std::size_t cap = kDefaultEnumerationCap) {
  if (devices.empty()) throw UsageError("GPM needs at least one device");
  return build_gpm(profit_tensor(devices, g, cap));
}

struct GpmSolution {
  CorrelatedDistribution distribution;
  double total_expected_profit = 0.0;
  /// The optimal vertex may not be unique; see LpSolution::alternative_optima.
  bool alternative_optima = false;
  std::size_t iterations = 0;
};

namespace detail {

inline CorrelatedDistribution clean_distribution(std::size_t n, std::vector<double> x, double feas_tol) {
  for (double& v : x) {
    if (v < -feas_tol) throw NumericalError("solver returned a probability below -feas_tol");
    if (v < 0.0) v = 0.0;
  }
  return {n, std::move(x)};
}

}  // namespace detail

inline double expected_total_profit(const CorrelatedDistribution& dist, const ProfitTable& table) {
  double sum = 0.0;
  for (std::size_t k = 0; k < dist.probabilities.size(); ++k)
    if (dist.probabilities[k] != 0.0) sum += dist.probabilities[k] * table.total(k);
  return sum;
}

inline GpmSolution solve_gpm(const ProfitTable& table, const Tolerances& tol = {}) {
  const GpmProgram prog = build_gpm(table);
  const LpSolution lp = solve(prog.filtered(), tol);
  if (lp.status == LpStatus::Infeasible)
    throw InternalError("GPM reported infeasible; the all-abstain outcome is always a correlated equilibrium");
  if (lp.status == LpStatus::Unbounded) throw InternalError("GPM reported unbounded over a simplex");

  GpmSolution out;
  out.distribution = detail::clean_distribution(table.devices(), lp.x, tol.feas);
  out.total_expected_profit = lp.objective_value;
  if (out.total_expected_profit == 0.0) out.total_expected_profit = 0.0;  // no -0
  out.alternative_optima = lp.alternative_optima;
  out.iterations = lp.iterations;
  return out;
}

inline GpmSolution solve_gpm(std::span<const DeviceProfile> devices, const GameParams& g, const Tolerances& tol = {},
                             std::size_t cap = kDefaultEnumerationCap) {
  return solve_gpm(profit_tensor(devices, g, cap), tol);
}

struct CeVerdict {
  bool ok = true;
  /// Most negative obedience sum found (0 if none negative).
  double worst_value = 0.0;
  CeRowTag worst;
};

inline CeVerdict verify_ce(const CorrelatedDistribution& dist, const ProfitTable& table, double tol = 1e-7) {
  if (dist.n != table.devices() || dist.probabilities.size() != table.outcomes())
    throw UsageError("distribution dimension does not match the game (" + std::to_string(dist.n) + " vs " +
                     std::to_string(table.devices()) + " devices)");
  CeVerdict verdict;
  bool first = true;
  for (std::size_t i = 0; i < dist.n; ++i)
    for (int rec = 0; rec <= 1; ++rec)
      for (int dev = 0; dev <= 1; ++dev) {
        double sum = 0.0;
        if (rec != dev)
          for (std::size_t k = 0; k < table.outcomes(); ++k) {
            if (static_cast<int>((k >> i) & 1U) != rec || dist.probabilities[k] == 0.0) continue;
            sum += dist.probabilities[k] * (table.at(k, i) - table.at(k ^ (std::size_t{1} << i), i));
          }
        if (first || sum < verdict.worst_value) {
          verdict.worst_value = sum;
          verdict.worst = {i, rec, dev};
          first = false;
        }
      }
  verdict.ok = verdict.worst_value >= -tol;
  if (verdict.worst_value > 0.0) verdict.worst_value = 0.0;
  return verdict;
}

inline CeVerdict verify_ce(const CorrelatedDistribution& dist, std::span<const DeviceProfile> devices,
                           const GameParams& g, double tol = 1e-7) {
  return verify_ce(dist, profit_tensor(devices, g), tol);
}

/// Inverse-CDF draw of one joint outcome over the canonical order.
inline DecisionVector sample_decision(const CorrelatedDistribution& dist, Rng& rng) {
  if (dist.probabilities.empty()) return DecisionVector(dist.n);
  double total = 0.0;
  for (double v : dist.probabilities) total += std::max(0.0, v);
  const double target = rng.uniform01() * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
    const double v = std::max(0.0, dist.probabilities[k]);
    if (v <= 0.0) continue;
    last_positive = k;
    cum += v;
    if (target < cum) return DecisionVector::from_index(k, dist.n);
  }
  return DecisionVector::from_index(last_positive, dist.n);
}

inline DecisionVector sample_decision(const CorrelatedDistribution& dist, std::uint64_t seed) {
  Rng rng(seed);
  return sample_decision(dist, rng);
}

inline std::vector<double> marginals(const CorrelatedDistribution& dist) {
  std::vector<double> out(dist.n, 0.0);
  for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
    const double v = dist.probabilities[k];
    if (v == 0.0) continue;
    for (std::size_t i = 0; i < dist.n; ++i)
      if ((k >> i) & 1U) out[i] += v;
  }
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

inline constexpr double kDecisionThreshold = 0.5;

/// Reporting rule: device participates iff its marginal is at least 0.5.
inline DecisionVector threshold_decision(std::span<const double> marginal, double threshold = kDecisionThreshold) {
  DecisionVector p(marginal.size());
  for (std::size_t i = 0; i < marginal.size(); ++i) p.set(i, marginal[i] >= threshold ? 1 : 0);
  return p;
}

}  // namespace fedpart
