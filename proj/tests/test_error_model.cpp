#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fedpart/error_model.hpp"
#include "fedpart/game_model.hpp"
#include "fedpart/random.hpp"

using namespace fedpart;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::vector<ErrorSample> noisy_curve(double a, double b, double noise, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ErrorSample> pts;
  for (double s = 100; s <= 60000; s *= 1.25) {
    // Box-Muller keeps the draw independent of the standard library's distributions.
    const double u1 = 1.0 - rng.uniform01(), u2 = rng.uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    pts.push_back({s, a * std::pow(s, -b) * (1.0 + noise * z)});
  }
  return pts;
}

TEST(FitPowerLaw, TwoExactPoints) {
  const std::vector<ErrorSample> pts{{100, 0.2}, {400, 0.1}};
  const auto c = fit_power_law(pts);
  EXPECT_LE(rel(c.a, 2.0), 1e-12);
  EXPECT_LE(rel(c.b, 0.5), 1e-12);
  EXPECT_NEAR(*c.fit_r2, 1.0, 1e-12);
}

TEST(FitPowerLaw, NoiselessRecovery) {
  const auto pts = noisy_curve(13.2, 0.7, 0.0, 1);
  const auto c = fit_power_law(pts);
  EXPECT_LE(rel(c.a, 13.2), 1e-10);
  EXPECT_LE(rel(c.b, 0.7), 1e-10);
}

TEST(FitPowerLaw, OnePercentNoise) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = fit_power_law(noisy_curve(13.2, 0.7, 0.01, seed));
    EXPECT_LE(rel(c.a, 13.2), 0.05);
    EXPECT_LE(rel(c.b, 0.7), 0.05);
    EXPECT_GE(*c.fit_r2, 0.99);
  }
}

TEST(FitPowerLaw, Errors) {
  EXPECT_THROW(fit_power_law(std::vector<ErrorSample>{{100, 0.2}}), UsageError);
  EXPECT_THROW(fit_power_law(std::vector<ErrorSample>{{100, 0.2}, {0, 0.1}}), UsageError);
  EXPECT_THROW(fit_power_law(std::vector<ErrorSample>{{100, 0.2}, {200, -0.1}}), UsageError);
  EXPECT_THROW(fit_power_law(std::vector<ErrorSample>{{100, 0.2}, {100, 0.1}}), UsageError);
}

TEST(PredictError, Examples) {
  const ErrorCurve def;
  EXPECT_NEAR(predict_error(1000, def), 0.104851, 5e-7);
  const ErrorCurve flat{3.0, 0.0, std::nullopt};
  for (double s : {1.0, 10.0, 1e6}) EXPECT_DOUBLE_EQ(predict_error(s, flat), 3.0);
  // a^(1/b) = 39.886; the commonly quoted figure is 39.95.
  const double break_even = std::pow(13.2, 1.0 / 0.7);
  EXPECT_NEAR(break_even, 39.95, 0.1);
  EXPECT_NEAR(predict_error(39.9, def), 1.0, 2e-3);
  EXPECT_NEAR(predict_error(break_even, def), 1.0, 1e-12);
  EXPECT_THROW(predict_error(0.0, def), UsageError);
}

TEST(PredictError, DecreasingInSize) {
  const ErrorCurve def;
  double last = predict_error(1.0, def);
  for (double s = 2; s < 1e5; s *= 1.5) {
    const double e = predict_error(s, def);
    EXPECT_LT(e, last);
    last = e;
  }
}

TEST(PredictError, ConsistentWithIncentive) {
  const ErrorCurve def;
  const GameParams g;
  for (double s : {40.0, 100.0, 500.0, 1234.5}) {
    const auto d = make_devices({s});
    EXPECT_NEAR(total_incentive({1}, d, g), g.alpha * (1 - predict_error(s, def)), 1e-12);
  }
}

TEST(ReadErrorCsv, ParsesAndRejects) {
  std::istringstream good("size,error\n100,0.2\r\n400,0.1\n\n");
  const auto pts = read_error_csv(good);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].size, 400.0);
  std::istringstream three("size,error\n1,2,3\n");
  EXPECT_THROW(read_error_csv(three), UsageError);
  std::istringstream junk("size,error\n1,abc\n");
  EXPECT_THROW(read_error_csv(junk), UsageError);
  std::istringstream empty("");
  EXPECT_THROW(read_error_csv(empty), UsageError);
}

}  // namespace
