#pragma once

// Power-law learning curve err(S) = a * S^(-b), fitted by ordinary least
// squares on (ln S, ln err).

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fedpart/error.hpp"

namespace fedpart {

struct ErrorSample {
  double size = 0.0;
  double error = 0.0;
};

struct ErrorCurve {
  double a = 13.2;
  double b = 0.7;
  std::optional<double> fit_r2;  ///< log-space R^2, set by fit_power_law

  void validate() const {
    if (!(a >= 0.0) || !(b >= 0.0)) throw UsageError("error curve needs a >= 0 and b >= 0");
  }
};

inline ErrorCurve fit_power_law(std::span<const ErrorSample> points) {
  if (points.size() < 2) throw UsageError("power-law fit needs at least 2 points");
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    if (!(p.size > 0.0) || !(p.error > 0.0) || !std::isfinite(p.size) || !std::isfinite(p.error))
      throw UsageError("power-law fit needs strictly positive, finite sizes and errors");
    mx += std::log(p.size);
    my += std::log(p.error);
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.size) - mx;
    const double dy = std::log(p.error) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw UsageError("degenerate fit: all sizes are equal");

  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  double sse = 0.0;
  for (const auto& p : points) {
    const double r = std::log(p.error) - (intercept + slope * std::log(p.size));
    sse += r * r;
  }
  ErrorCurve curve;
  curve.a = std::exp(intercept);
  curve.b = -slope;
  curve.fit_r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return curve;
}

inline double predict_error(double size, const ErrorCurve& curve) {
  if (!(size > 0.0)) throw UsageError("predict_error needs a positive size, got " + std::to_string(size));
  return curve.a * std::exp(-curve.b * std::log(size));
}

/// Two-column CSV (size, error) with one header row.
inline std::vector<ErrorSample> read_error_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("error CSV is empty (expected a header row)");
  std::vector<ErrorSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream row(line);
    std::string first, second, extra;
    if (!std::getline(row, first, ',') || !std::getline(row, second, ',') || std::getline(row, extra, ','))
      throw UsageError("error CSV line " + std::to_string(line_no) + ": expected exactly two columns");
    try {
      std::size_t used1 = 0, used2 = 0;
      const double s = std::stod(first, &used1);
      const double e = std::stod(second, &used2);
      if (first.find_first_not_of(" \t", used1) != std::string::npos ||
          second.find_first_not_of(" \t", used2) != std::string::npos)
        throw std::invalid_argument("trailing characters");
      out.push_back({s, e});
    } catch (const std::exception&) {
      throw UsageError("error CSV line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
  }
  return out;
}

inline std::vector<ErrorSample> read_error_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open error CSV '" + path + "'");
  return read_error_csv(in);
}

}  // namespace fedpart
