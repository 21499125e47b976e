// Copyright 2026 The ViFi Authors
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

#include <gtest/gtest.h>

#include "vifi/errors.hpp"
#include "vifi/stats.hpp"

namespace vifi {
namespace {

TEST(Stats, MeanAndQuantiles) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(mean(v), 3.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(std::vector<double>{0, 10}, 0.3), 3.0);
  EXPECT_THROW(mean(std::vector<double>{}), DomainError);
  EXPECT_THROW(quantile_sorted(std::vector<double>{}, 0.5), DomainError);
}

TEST(Stats, BoxplotSeparatesOutliers) {
  const std::vector<double> v{5, 1, 2, 3, 4, 100};
  const BoxStats s = boxplot(v);
  EXPECT_DOUBLE_EQ(s.p25, 2.25);
  EXPECT_DOUBLE_EQ(s.median, 3.5);
  EXPECT_DOUBLE_EQ(s.p75, 4.75);
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 5.0);
  EXPECT_EQ(s.outliers, std::vector<double>{100});
}

TEST(Stats, BoxplotOfConstantSample) {
  const BoxStats s = boxplot(std::vector<double>(7, 2.5));
  EXPECT_EQ(s.min, 2.5);
  EXPECT_EQ(s.max, 2.5);
  EXPECT_TRUE(s.outliers.empty());
}

TEST(Stats, CdfIsSortedAndEndsAtOne) {
  const std::vector<double> v{0.3, 0.1, 0.7};
  const auto cdf = empirical_cdf(v);
  ASSERT_EQ(cdf.size(), 3u);
  EXPECT_EQ(cdf[0].value, 0.1);
  EXPECT_DOUBLE_EQ(cdf[0].cumulative_fraction, 1.0 / 3.0);
  EXPECT_EQ(cdf[2].value, 0.7);
  EXPECT_EQ(cdf[2].cumulative_fraction, 1.0);
  for (std::size_t i = 1; i < cdf.size(); ++i)
    EXPECT_GE(cdf[i].cumulative_fraction, cdf[i - 1].cumulative_fraction);
}

}  // namespace
}  // namespace vifi
