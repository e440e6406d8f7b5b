#pragma once

// Truthful data-size solicitation between the edge server and one device.
//
// The server publishes a reward rule r(s); the device, holding a private
// malice probability theta, reports the size s maximizing
//   U_d = T * (r(s) * s + A_d * theta * s + B_d),
// while the server's utility is
//   U_e = T * (sigma * sigmoid(s - s0) - rho * (r - r0)^2 - (A_e * theta * s * r + B_e)).
// Both integrands are time-invariant, so integrating over [0, T] scales by T.

#include <cmath>
#include <string>
#include <vector>

#include "fedpart/error.hpp"

namespace fedpart {

/// Private parameters of a device.
struct DeviceMechParams {
  double theta = 0.5;  ///< malice probability, in (0, 1]
  double a_d = 1.0;    ///< extra-profit slope
  double b_d = 1.0;    ///< extra-profit constant

  void validate() const {
    if (!(theta > 0.0 && theta <= 1.0)) throw UsageError("theta must lie in (0, 1]");
    if (!(a_d >= 0.0) || !(b_d >= 0.0)) throw UsageError("A_d and B_d must be >= 0");
  }
};

/// Server-side parameters of the mechanism.
struct ServerMechParams {
  double a_e = 1.0;
  double b_e = 1.0;
  double sigma = 1e5;
  double rho = 10.0;
  double s0 = 500.0;  ///< expected data size
  double r0 = 50.0;   ///< expected reward coefficient
  double horizon = 1.0;

  void validate() const {
    if (!(a_e > 0.0)) throw UsageError("A_e must be > 0");
    if (!(b_e >= 0.0)) throw UsageError("B_e must be >= 0");
    if (!(sigma > 0.0) || !(rho > 0.0)) throw UsageError("sigma and rho must be > 0");
    if (!(horizon > 0.0)) throw UsageError("horizon T must be > 0");
    if (!std::isfinite(s0) || !std::isfinite(r0)) throw UsageError("s0 and r0 must be finite");
  }
};

/// Linear reward rule r(s) = intercept + slope * s.
struct GameRule {
  double intercept = 0.0;
  double slope = 0.0;

  double operator()(double s) const noexcept { return intercept + slope * s; }
};

namespace detail {

inline void check_size(double s) {
  if (!(s >= 0.0)) throw UsageError("reported size must be >= 0, got " + std::to_string(s));
}

inline void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw UsageError("theta must lie in (0, 1], got " + std::to_string(theta));
}

/// sigma / (1 + exp(-x)) without overflow for large |x|.
inline double scaled_sigmoid(double sigma, double x) {
  if (x > 40.0) return sigma;
  if (x < -40.0) return sigma * std::exp(x);
  return sigma / (1.0 + std::exp(-x));
}

}  // namespace detail

inline double device_utility(double r, double s, const DeviceMechParams& dev, double horizon) {
  detail::check_size(s);
  return horizon * (r * s + dev.a_d * dev.theta * s + dev.b_d);
}

inline double server_reward(double r, double s, const ServerMechParams& srv) {
  const double dr = r - srv.r0;
  return detail::scaled_sigmoid(srv.sigma, s - srv.s0) - srv.rho * dr * dr;
}

inline double server_loss(double r, double s, double theta, const ServerMechParams& srv) {
  return srv.a_e * theta * s * r + srv.b_e;
}

inline double server_utility(double r, double s, double theta, const ServerMechParams& srv, double horizon) {
  detail::check_size(s);
  return horizon * (server_reward(r, s, srv) - server_loss(r, s, theta, srv));
}

/// Pointwise maximizer of the server integrand in r: r(s) = r0 - A_e theta s / (2 rho).
inline GameRule optimal_rule(double theta, const ServerMechParams& srv) {
  detail::check_theta(theta);
  srv.validate();
  // d^2 H_e / dr^2 = -2 rho must be negative for a maximum.
  if (!(-2.0 * srv.rho < 0.0)) throw NumericalError("server objective is not concave in r");
  return {srv.r0, -srv.a_e * theta / (2.0 * srv.rho)};
}

/// The device's optimal report against the rule built from the same theta:
/// s* = rho (r0 + A_d theta) / (A_e theta).
inline double best_response(double theta, const ServerMechParams& srv, const DeviceMechParams& dev) {
  if (theta == 0.0) throw UsageError("best response is singular at theta = 0");
  detail::check_theta(theta);
  srv.validate();
  const double s = srv.rho * (srv.r0 + dev.a_d * theta) / (srv.a_e * theta);

  // Concavity and a finite-difference argmax check on the device integrand.
  const GameRule rule = optimal_rule(theta, srv);
  auto h = [&](double x) { return rule(x) * x + dev.a_d * theta * x + dev.b_d; };
  const double step = 1e-3 * std::max(1.0, std::abs(s));
  const double centre = h(s);
  const double slack = 1e-12 * std::max(1.0, std::abs(centre));
  if (h(s - step) > centre + slack || h(s + step) > centre + slack)
    throw NumericalError("best response failed the local argmax check");
  return s;
}

/// Recovers theta from a report assumed to be a best response:
/// theta = rho r0 / (A_e s - rho A_d).
inline double infer_theta(double s_reported, const ServerMechParams& srv, double a_d) {
  const double denom = srv.a_e * s_reported - srv.rho * a_d;
  if (!(denom > 0.0))
    throw UsageError("reported size " + std::to_string(s_reported) + " is too small to invert (A_e*s <= rho*A_d)");
  return srv.rho * srv.r0 / denom;
}

/// Both parties' utilities when the device plays its best response.
struct MechanismOutcome {
  double report = 0.0;  ///< s*
  double reward = 0.0;  ///< r*(s*)
  double device_utility = 0.0;
  double server_utility = 0.0;
  bool accepted = false;
};

inline MechanismOutcome evaluate_mechanism(const DeviceMechParams& dev, const ServerMechParams& srv) {
  dev.validate();
  MechanismOutcome out;
  out.report = best_response(dev.theta, srv, dev);
  out.reward = optimal_rule(dev.theta, srv)(out.report);
  if (out.report < 0.0) return out;  // no feasible report; utilities left at 0
  out.device_utility = device_utility(out.reward, out.report, dev, srv.horizon);
  out.server_utility = server_utility(out.reward, out.report, dev.theta, srv, srv.horizon);
  out.accepted = out.report > 0.0 && out.device_utility > 0.0;
  return out;
}

/// Whether the device sends its report. A device stays silent when its best
/// response is not a positive size or its utility is not strictly positive.
inline bool accepts(double theta, const ServerMechParams& srv, const DeviceMechParams& dev) {
  DeviceMechParams d = dev;
  d.theta = theta;
  return evaluate_mechanism(d, srv).accepted;
}

struct IcPoint {
  double claimed_theta = 0.0;
  double report = 0.0;
  double utility = 0.0;
};

struct IcVerdict {
  bool ok = true;
  double truthful_utility = 0.0;
  /// Best utility over claimed thetas that differ from the truth.
  double best_deviation_utility = 0.0;
  double best_deviation_theta = 0.0;
  /// truthful_utility - best_deviation_utility.
  double margin = 0.0;
  std::vector<IcPoint> points;
};

inline constexpr double kIcGridStep = 0.05;

/// Claims theta' on the grid {step, 2 step, ..., 1}, reports best_response(theta')
/// and is paid by the rule built on the true theta. Truth-telling must be the
/// grid maximum within 1e-9 relative.
inline IcVerdict ic_check(double theta_true, const ServerMechParams& srv, const DeviceMechParams& dev,
                          double grid_step = kIcGridStep) {
  detail::check_theta(theta_true);
  if (!(grid_step > 0.0)) throw UsageError("grid step must be > 0");
  const GameRule rule = optimal_rule(theta_true, srv);
  DeviceMechParams truth = dev;
  truth.theta = theta_true;

  auto utility_of_claim = [&](double claimed) {
    const double s = best_response(claimed, srv, dev);
    return IcPoint{claimed, s, device_utility(rule(s), std::max(0.0, s), truth, srv.horizon)};
  };

  IcVerdict v;
  v.truthful_utility = utility_of_claim(theta_true).utility;
  v.points.push_back({theta_true, best_response(theta_true, srv, dev), v.truthful_utility});
  bool any = false;
  const auto steps = static_cast<long>(std::floor(1.0 / grid_step + 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double claimed = std::min(1.0, static_cast<double>(k) * grid_step);
    if (std::abs(claimed - theta_true) <= 1e-12) continue;
    const IcPoint pt = utility_of_claim(claimed);
    v.points.push_back(pt);
    if (!any || pt.utility > v.best_deviation_utility) {
      v.best_deviation_utility = pt.utility;
      v.best_deviation_theta = claimed;
      any = true;
    }
  }
  if (!any) {
    v.best_deviation_utility = v.truthful_utility;
    v.best_deviation_theta = theta_true;
    v.margin = 0.0;
    return v;
  }
  v.margin = v.truthful_utility - v.best_deviation_utility;
  v.ok = v.best_deviation_utility <= v.truthful_utility + 1e-9 * std::abs(v.truthful_utility);
  return v;
}

/// Diagnostic only: the server evaluates the rule at the theta it infers from
/// each report instead of the true theta. Incentive compatibility is not
/// claimed in this frame; under-reporting theta can pay more here.
inline std::vector<IcPoint> ic_inferred_frame(double theta_true, const ServerMechParams& srv,
                                              const DeviceMechParams& dev, double grid_step = kIcGridStep) {
  DeviceMechParams truth = dev;
  truth.theta = theta_true;
  std::vector<IcPoint> out;
  const auto steps = static_cast<long>(std::floor(1.0 / grid_step + 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double claimed = std::min(1.0, static_cast<double>(k) * grid_step);
    const double s = best_response(claimed, srv, dev);
    const double inferred = infer_theta(s, srv, dev.a_d);
    const double r = optimal_rule(std::min(1.0, inferred), srv)(s);
    out.push_back({claimed, s, device_utility(r, std::max(0.0, s), truth, srv.horizon)});
  }
  return out;
}

}  // namespace fedpart
