#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fedpart/game_model.hpp"
#include "oracles.hpp"

using namespace fedpart;

namespace {

const GameParams kParams{};

TEST(TotalIncentive, ZeroWhenNobodyJoins) {
  const auto d = make_devices({500, 500});
  EXPECT_EQ(total_incentive({0, 0}, d, kParams), 0.0);
}

// Reference values are quoted truncated to five decimals (8.296685 -> 8.29668),
// so they are checked to 2e-5; the long double oracle is checked tightly.
TEST(TotalIncentive, MatchesOracle) {
  const auto d = make_devices({500, 500});
  const oracle::Game o{{500, 500}};
  EXPECT_NEAR(total_incentive({1, 1}, d, kParams), static_cast<double>(oracle::incentive(o, 3)), 1e-12);
  EXPECT_NEAR(total_incentive({1, 1}, d, kParams), 8.95149, 5e-6);
  EXPECT_NEAR(total_incentive({1, 0}, d, kParams), 8.29668, 2e-5);
}

TEST(TotalIncentive, NegativeBelowBreakEven) {
  const auto d = make_devices({20});
  EXPECT_LT(total_incentive({1}, d, kParams), 0.0);
}

TEST(TotalIncentive, LengthMismatchIsUsageError) {
  const auto d = make_devices({500, 500});
  EXPECT_THROW(total_incentive({1}, d, kParams), UsageError);
}

TEST(DeviceReward, Examples) {
  const auto d = make_devices({500, 500});
  EXPECT_EQ(device_reward(0, {0, 1}, d, kParams), 0.0);
  EXPECT_NEAR(device_reward(1, {1, 1}, d, kParams), 4.47574, 5e-6);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(device_reward(i, {0, 0}, d, kParams), 0.0);
  EXPECT_THROW(device_reward(2, {1, 1}, d, kParams), UsageError);
}

TEST(DeviceCost, Examples) {
  EXPECT_NEAR(device_cost(0, make_devices({500})), 4.0, 1e-12);
  EXPECT_NEAR(device_cost(0, make_devices({50})), 3.55, 1e-12);
  EXPECT_EQ(device_cost(0, make_devices(std::vector<double>{0.0}, 0.0)), 0.0);
}

TEST(DeviceProfit, Examples) {
  const auto d = make_devices({500, 500});
  EXPECT_EQ(device_profit(0, {0, 0}, d, kParams), 0.0);
  EXPECT_EQ(device_profit(1, {1, 0}, d, kParams), 0.0);
  EXPECT_NEAR(device_profit(1, {1, 1}, d, kParams), 0.47574, 5e-6);
  EXPECT_NEAR(device_profit(0, {1, 0}, d, kParams), 4.29668, 2e-5);
}

TEST(DecisionVector, IndexRoundTripLeastSignificantFirst) {
  const DecisionVector p = DecisionVector::from_index(0b101, 3);
  EXPECT_EQ(p[0], 1);
  EXPECT_EQ(p[1], 0);
  EXPECT_EQ(p[2], 1);
  EXPECT_EQ(p.to_index(), 5u);
  EXPECT_EQ(p.participants(), 2u);
}

TEST(ProfitTensor, SingleDevice) {
  const auto t = profit_tensor(make_devices({500}), kParams);
  ASSERT_EQ(t.outcomes(), 2u);
  EXPECT_EQ(t.at(0, 0), 0.0);
  EXPECT_NEAR(t.at(1, 0), 4.29668, 2e-5);
}

TEST(ProfitTensor, EmptyGame) {
  const auto t = profit_tensor(std::vector<DeviceProfile>{}, kParams);
  EXPECT_EQ(t.devices(), 0u);
  EXPECT_EQ(t.outcomes(), 0u);
}

TEST(ProfitTensor, SymmetricUnderSwap) {
  const auto t = profit_tensor(make_devices({500, 500}), kParams);
  ASSERT_EQ(t.outcomes(), 4u);
  EXPECT_EQ(t.at(1, 0), t.at(2, 1));
  EXPECT_EQ(t.at(3, 0), t.at(3, 1));
}

TEST(ProfitTensor, MatchesPerOutcomeEvaluationAndOracle) {
  const std::vector<double> sizes{50, 500, 120, 800, 35};
  const auto d = make_devices(sizes);
  const auto t = profit_tensor(d, kParams);
  const oracle::Game o{{sizes.begin(), sizes.end()}};
  for (std::size_t k = 0; k < t.outcomes(); ++k) {
    const auto p = DecisionVector::from_index(k, d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(t.at(k, i), device_profit(i, p, d, kParams));
      EXPECT_NEAR(t.at(k, i), static_cast<double>(oracle::profit(o, i, k)), 1e-11);
    }
  }
}

TEST(ProfitTensor, RelabelingPermutesEntries) {
  const std::vector<double> sizes{50, 500, 120, 800};
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<double> permuted(sizes.size());
  for (std::size_t i = 0; i < perm.size(); ++i) permuted[i] = sizes[perm[i]];
  const auto a = profit_tensor(make_devices(sizes), kParams);
  const auto b = profit_tensor(make_devices(permuted), kParams);
  for (std::size_t k = 0; k < b.outcomes(); ++k) {
    std::size_t original = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      if ((k >> i) & 1U) original |= std::size_t{1} << perm[i];
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_NEAR(b.at(k, i), a.at(original, perm[i]), 1e-12);
  }
}

TEST(ProfitTensor, CapacityErrorNamesCap) {
  std::vector<double> sizes(6, 500.0);
  try {
    profit_tensor(make_devices(sizes), kParams, 5);
    FAIL() << "expected capacity error";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("5"), std::string::npos);
  }
}

TEST(GameProperties, RewardsNeverOverDistribute) {
  const std::vector<double> sizes{50, 500, 120, 800};
  const auto d = make_devices(sizes);
  for (std::uint64_t k = 0; k < 16; ++k) {
    const auto p = DecisionVector::from_index(k, 4);
    const double pi = total_incentive(p, d, kParams);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double phi = device_reward(i, p, d, kParams);
      if (pi >= 0.0) {
        EXPECT_GE(phi, 0.0);
      }
      if (!p[i]) {
        EXPECT_EQ(phi, 0.0);
      }
      sum += phi;
    }
    if (pi >= 0.0) {
      EXPECT_LE(sum, pi + 1e-12);
    }
  }
}

TEST(GameProperties, IncentiveNondecreasingInOwnSize) {
  double last = -1e300;
  for (double s = 10; s <= 2000; s += 10) {
    const auto d = make_devices({s, 300});
    const double pi = total_incentive({1, 1}, d, kParams);
    EXPECT_GE(pi, last);
    last = pi;
  }
}

TEST(GameProperties, CostIndependentOfOthers) {
  const auto a = make_devices({500, 50});
  const auto b = make_devices({500, 5000});
  EXPECT_EQ(device_cost(0, a), device_cost(0, b));
}

}  // namespace
