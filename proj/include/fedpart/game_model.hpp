#pragma once

// Participation game: devices choose to join (1) or abstain (0); the server
// pays a total incentive driven by a power-law error curve in the pooled
// data size and splits it proportionally to each participant's size.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedpart/error.hpp"

namespace fedpart {

inline constexpr std::size_t kDefaultEnumerationCap = 20;

/// Public registration record of one edge device.
struct DeviceProfile {
  std::size_t id = 0;
  double size = 0.0;          ///< local data size s_i (samples)
  double channel_cost = 0.0;  ///< channel-condition weight w_i
  double beta = 1e-3;         ///< compute-cost scalar
  double gamma = 1e-5;        ///< communication-cost scalar

  void validate() const {
    if (!(size >= 0.0) || !std::isfinite(size))
      throw UsageError("device " + std::to_string(id) + ": data size must be finite and >= 0");
    if (!(channel_cost >= 0.0) || !std::isfinite(channel_cost))
      throw UsageError("device " + std::to_string(id) + ": channel cost must be finite and >= 0");
    if (!(beta > 0.0) || !(gamma > 0.0))
      throw UsageError("device " + std::to_string(id) + ": beta and gamma must be > 0");
  }
};

/// Global payoff constants of the participation game.
struct GameParams {
  double alpha = 10.0;  ///< incentive scale
  double err_a = 13.2;  ///< power-law error coefficient
  double err_b = 0.7;   ///< power-law error exponent
  double delta = 1e-3;  ///< reward denominator guard

  void validate() const {
    if (!(alpha > 0.0)) throw UsageError("alpha must be > 0");
    if (!(err_a >= 0.0) || !(err_b >= 0.0)) throw UsageError("power-law a and b must be >= 0");
    if (!(delta > 0.0)) throw UsageError("delta must be > 0");
  }
};

/// Joint participation decision p, one 0/1 entry per device.
class DecisionVector {
 public:
  DecisionVector() = default;
  explicit DecisionVector(std::size_t n) : bits_(n, 0) {}
  DecisionVector(std::initializer_list<int> bits) {
    for (int b : bits) push_back(b);
  }

  /// Outcome `index` in canonical order: device 0 is the least-significant bit.
  static DecisionVector from_index(std::uint64_t index, std::size_t n) {
    DecisionVector p(n);
    for (std::size_t i = 0; i < n; ++i) p.bits_[i] = static_cast<std::uint8_t>((index >> i) & 1U);
    return p;
  }

  std::uint64_t to_index() const {
    if (bits_.size() > 63) throw CapacityError("decision vector too long to index (max 63 devices)");
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) index |= static_cast<std::uint64_t>(bits_[i]) << i;
    return index;
  }

  void push_back(int bit) {
    if (bit != 0 && bit != 1) throw UsageError("decision entries must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(bit));
  }

  std::size_t size() const noexcept { return bits_.size(); }
  int operator[](std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, int bit) {
    if (bit != 0 && bit != 1) throw UsageError("decision entries must be 0 or 1");
    bits_.at(i) = static_cast<std::uint8_t>(bit);
  }

  std::size_t participants() const noexcept {
    std::size_t count = 0;
    for (auto b : bits_) count += b;
    return count;
  }

  /// "1010..." with device 0 first.
  std::string to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (auto b : bits_) out.push_back(b ? '1' : '0');
    return out;
  }

  friend bool operator==(const DecisionVector&, const DecisionVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

namespace detail {

inline void check_lengths(const DecisionVector& p, std::span<const DeviceProfile> devices) {
  if (p.size() != devices.size())
    throw UsageError("decision vector has " + std::to_string(p.size()) + " entries but there are " +
                     std::to_string(devices.size()) + " devices");
}

inline void check_index(std::size_t i, std::size_t n) {
  if (i >= n) throw UsageError("device index " + std::to_string(i) + " out of range (n=" + std::to_string(n) + ")");
}

inline double pooled_size(const DecisionVector& p, std::span<const DeviceProfile> devices) {
  double total = 0.0;
  for (std::size_t i = 0; i < devices.size(); ++i)
    if (p[i]) total += devices[i].size;
  return total;
}

}  // namespace detail

/// Total incentive from the pooled size alone. The zero branch covers an
/// empty coalition; a coalition whose pooled size is exactly 0 trains no
/// model and is treated the same way. Not clamped below zero.
inline double incentive_for_pooled_size(double pooled, std::size_t participants, const GameParams& g) {
  if (participants == 0 || pooled <= 0.0) return 0.0;
  return g.alpha * (1.0 - g.err_a * std::exp(-g.err_b * std::log(pooled)));
}

inline double total_incentive(const DecisionVector& p, std::span<const DeviceProfile> devices,
                              const GameParams& g) {
  detail::check_lengths(p, devices);
  return incentive_for_pooled_size(detail::pooled_size(p, devices), p.participants(), g);
}

inline double device_reward(std::size_t i, const DecisionVector& p, std::span<const DeviceProfile> devices,
                            const GameParams& g) {
  detail::check_lengths(p, devices);
  detail::check_index(i, devices.size());
  if (!p[i]) return 0.0;
  const double pooled = detail::pooled_size(p, devices);
  return devices[i].size / (g.delta + pooled) * incentive_for_pooled_size(pooled, p.participants(), g);
}

inline double device_cost(std::size_t i, std::span<const DeviceProfile> devices) {
  detail::check_index(i, devices.size());
  const auto& d = devices[i];
  return d.beta * d.size + d.gamma * d.channel_cost;
}

inline double device_profit(std::size_t i, const DecisionVector& p, std::span<const DeviceProfile> devices,
                            const GameParams& g) {
  const double reward = device_reward(i, p, devices, g);
  return p[i] ? reward - device_cost(i, devices) : reward;
}

/// Per-outcome profits for all 2^n joint decisions, row-major
/// [outcome][device], outcomes in canonical binary-counting order.
class ProfitTable {
 public:
  ProfitTable() = default;
  ProfitTable(std::size_t n, std::vector<double> values, std::vector<double> incentives)
      : n_(n), values_(std::move(values)), incentives_(std::move(incentives)) {}

  std::size_t devices() const noexcept { return n_; }
  std::size_t outcomes() const noexcept { return n_ == 0 ? 0 : std::size_t{1} << n_; }

  double at(std::size_t outcome, std::size_t device) const { return values_[outcome * n_ + device]; }
  std::span<const double> row(std::size_t outcome) const {
    return std::span<const double>(values_).subspan(outcome * n_, n_);
  }
  double total(std::size_t outcome) const {
    double sum = 0.0;
    for (double v : row(outcome)) sum += v;
    return sum;
  }
  /// pi(p) for the outcome; negative when the pooled size is below break-even.
  double incentive(std::size_t outcome) const { return incentives_[outcome]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
  std::vector<double> incentives_;
};

inline void validate_game(std::span<const DeviceProfile> devices, const GameParams& g) {
  g.validate();
  for (const auto& d : devices) d.validate();
  for (std::size_t i = 0; i < devices.size(); ++i)
    for (std::size_t j = i + 1; j < devices.size(); ++j)
      if (devices[i].id == devices[j].id)
        throw UsageError("duplicate device id " + std::to_string(devices[i].id));
}

inline void check_enumeration_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw CapacityError(std::to_string(n) + " devices exceed the enumeration cap of " + std::to_string(cap) +
                        " (2^n outcomes)");
  if (n > 30) throw CapacityError("enumeration beyond 30 devices is not supported");
}

inline ProfitTable profit_tensor(std::span<const DeviceProfile> devices, const GameParams& g,
                                 std::size_t cap = kDefaultEnumerationCap) {
  check_enumeration_cap(devices.size(), cap);
  validate_game(devices, g);
  const std::size_t n = devices.size();
  if (n == 0) return {};

  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i) cost[i] = device_cost(i, devices);

  const std::size_t outcomes = std::size_t{1} << n;
  std::vector<double> values(outcomes * n, 0.0);
  std::vector<double> incentives(outcomes, 0.0);
  for (std::size_t k = 0; k < outcomes; ++k) {
    double pooled = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if ((k >> i) & 1U) {
        pooled += devices[i].size;
        ++count;
      }
    const double pi = incentive_for_pooled_size(pooled, count, g);
    incentives[k] = pi;
    for (std::size_t i = 0; i < n; ++i)
      if ((k >> i) & 1U) values[k * n + i] = devices[i].size / (g.delta + pooled) * pi - cost[i];
  }
  return ProfitTable(n, std::move(values), std::move(incentives));
}

/// Sum of all device profits for one joint decision.
inline double total_profit(const DecisionVector& p, std::span<const DeviceProfile> devices, const GameParams& g) {
  double sum = 0.0;
  for (std::size_t i = 0; i < devices.size(); ++i) sum += device_profit(i, p, devices, g);
  return sum;
}

/// Builds n devices with the given sizes and otherwise shared cost settings.
inline std::vector<DeviceProfile> make_devices(std::span<const double> sizes, double channel_cost = 3.5e5,
                                               double beta = 1e-3, double gamma = 1e-5) {
  std::vector<DeviceProfile> out;
  out.reserve(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) out.push_back({i, sizes[i], channel_cost, beta, gamma});
  return out;
}

inline std::vector<DeviceProfile> make_devices(std::initializer_list<double> sizes) {
  return make_devices(std::span<const double>(sizes.begin(), sizes.size()));
}

}  // namespace fedpart
