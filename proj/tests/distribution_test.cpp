// Copyright 2026 The discex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "discex/distribution.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace discex {
namespace {

using testing::Rng;

LogScoreVector scores(std::vector<double> s) {
  LogScoreVector v;
  v.scores = std::move(s);
  return v;
}

TEST(NormalizeTest, EqualScoresGiveUniform) {
  const auto d = normalize(scores(std::vector<double>(65, -12.5)));
  ASSERT_EQ(d.size(), 65u);
  for (double p : d.probs) EXPECT_NEAR(p, 1.0 / 65.0, 1e-15);
}

TEST(NormalizeTest, ClosedForm) {
  const auto d = normalize(scores({std::log(1.0), std::log(3.0)}));
  EXPECT_NEAR(d[0], 0.25, 1e-15);
  EXPECT_NEAR(d[1], 0.75, 1e-15);
}

TEST(NormalizeTest, NoUnderflowOnLongSequenceScores) {
  const auto d = normalize(scores({-5000.0, -5001.0, -9000.0}));
  EXPECT_NEAR(d[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
  EXPECT_GT(d[1], 0.0);
  EXPECT_EQ(d[2], 0.0);
}

TEST(NormalizeTest, RejectsNonFinite) {
  EXPECT_THROW(normalize(scores({0.0, std::nan("")})), DataError);
  EXPECT_THROW(normalize(scores({-std::numeric_limits<double>::infinity()})),
               DataError);
  EXPECT_THROW(normalize(scores({})), DataError);
}

TEST(TopConnectiveTest, Examples) {
  ConnectiveDistribution one_hot{{0, 0, 0, 1, 0}};
  EXPECT_EQ(top_connective(one_hot), 3u);
  ConnectiveDistribution tie{{0.1, 0.3, 0.1, 0.2, 0.3}};
  EXPECT_EQ(top_connective(tie), 1u);
  ConnectiveDistribution plain{{0.2, 0.5, 0.3}};
  EXPECT_EQ(top_connective(plain), 1u);
}

TEST(ValidateDistributionTest, Checks) {
  const std::vector<double> ok = {0.5, 0.5};
  EXPECT_NO_THROW(validate_distribution(ok, 2, 1e-9, "x"));
  EXPECT_THROW(validate_distribution(ok, 3, 1e-9, "x"), BackendError);
  const std::vector<double> short_mass = {0.4, 0.4};
  EXPECT_THROW(validate_distribution(short_mass, 2, 1e-6, "x"), BackendError);
  const std::vector<double> negative = {1.2, -0.2};
  EXPECT_THROW(validate_distribution(negative, 2, 1e-6, "x"), BackendError);
}

// Sums to one, is unchanged by a constant shift, and keeps its argmax.
TEST(NormalizeProperty, ShiftInvariance) {
  Rng rng(51);
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t n = 1 + rng.index(65);
    std::vector<double> s = rng.reals(n, -200.0, 0.0);
    if (rng.coin(0.2)) s[rng.index(n)] = s[rng.index(n)];  // exact ties
    const double c = rng.real(-1000.0, 1000.0);
    std::vector<double> shifted = s;
    for (double& v : shifted) v += c;
    const auto a = normalize(scores(s));
    const auto b = normalize(scores(shifted));
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      sum += a[i];
      EXPECT_GE(a[i], 0.0);
      EXPECT_NEAR(a[i], b[i], 1e-12);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_EQ(top_connective(a), top_connective(b));
    EXPECT_EQ(top_connective(a), argmax_first(s));
  }
}

}  // namespace
}  // namespace discex
