// Copyright 2026 The riskbatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskbatch/riskmath.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "riskbatch/errors.h"

namespace riskbatch::riskmath {
namespace {

using Wide = boost::multiprecision::cpp_dec_float_50;

double DirectProduct(const std::vector<double>& risks) {
  Wide survive = 1;
  for (double r : risks) survive *= Wide(1) - Wide(r);
  return static_cast<double>(Wide(1) - survive);
}

double WideAged(double r, double w, double a) {
  return static_cast<double>(Wide(1) -
                             (Wide(1) - Wide(r)) * exp(-Wide(a) * Wide(w)));
}

TEST(BatchFailProb, Examples) {
  EXPECT_EQ(BatchFailProb(std::vector<double>{}), 0.0);
  EXPECT_DOUBLE_EQ(BatchFailProb(std::vector<double>{0.3}), 0.3);
  EXPECT_NEAR(BatchFailProb(std::vector<double>{0.1, 0.2, 0.3}), 0.496, 1e-15);
  EXPECT_EQ(BatchFailProb(std::vector<double>{1.0, 0.0}), 1.0);
}

TEST(BatchFailProb, MatchesWideProductOnRandomLists) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> risk(0.0, 0.999);
  std::uniform_int_distribution<int> len(0, 20);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> risks(static_cast<std::size_t>(len(rng)));
    for (double& r : risks) r = risk(rng);
    ASSERT_NEAR(BatchFailProb(risks), DirectProduct(risks), 1e-12);
  }
}

TEST(BatchFailProb, StrictlyIncreasesWhenAppendingPositiveRisk) {
  std::vector<double> risks = {0.01, 0.2};
  double before = BatchFailProb(risks);
  for (double r : {0.05, 0.3, 1e-6}) {
    risks.push_back(r);
    const double after = BatchFailProb(risks);
    EXPECT_GT(after, before);
    before = after;
  }
}

TEST(BatchFailProb, PermutationInvariant) {
  std::vector<double> risks = {0.4, 0.01, 0.77, 0.3, 0.0, 0.5};
  const double reference = BatchFailProb(risks);
  std::sort(risks.begin(), risks.end());
  do {
    ASSERT_NEAR(BatchFailProb(risks), reference, 1e-12);
  } while (std::next_permutation(risks.begin(), risks.end()));
}

TEST(BatchFailProb, RejectsOutOfRange) {
  EXPECT_THROW(BatchFailProb(std::vector<double>{1.2}), ValidationError);
  EXPECT_THROW(BatchFailProb(std::vector<double>{-0.1}), ValidationError);
  EXPECT_THROW(BatchFailProb(std::vector<double>{std::nan("")}), ValidationError);
}

TEST(AgedRisk, Examples) {
  EXPECT_EQ(AgedRisk(0.4, 0.0, 3.0), 0.4);
  EXPECT_EQ(AgedRisk(0.4, 5.0, 0.0), 0.4);
  EXPECT_NEAR(AgedRisk(0.0, 10.0, 0.1), WideAged(0.0, 10.0, 0.1), 1e-15);
  EXPECT_NEAR(AgedRisk(0.0, 10.0, 0.1), 0.632121, 1e-6);
}

TEST(AgedRisk, MatchesWideClosedForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.0, 48.0);
  std::uniform_real_distribution<double> a(0.0, 2.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double rr = r(rng), ww = w(rng), aa = a(rng);
    ASSERT_NEAR(AgedRisk(rr, ww, aa), WideAged(rr, ww, aa), 1e-12);
  }
}

TEST(AgedRisk, MonotoneAndBounded) {
  for (double r : {0.0, 0.2, 0.9}) {
    double prev = r;
    for (double w = 0.0; w < 100.0; w += 3.7) {
      const double v = AgedRisk(r, w, 0.3);
      EXPECT_GE(v, prev);
      EXPECT_GE(v, r);
      EXPECT_LE(v, 1.0);
      prev = v;
    }
  }
  EXPECT_LE(AgedRisk(0.1, 2.0, 0.1), AgedRisk(0.1, 2.0, 0.2));
  EXPECT_LE(AgedRisk(0.1, 2.0, 0.1), AgedRisk(0.2, 2.0, 0.1));
  EXPECT_NEAR(AgedRisk(0.3, 1e4, 1.0), 1.0, 1e-12);
}

TEST(AgedRisk, RejectsNegativeInputs) {
  EXPECT_THROW(AgedRisk(0.1, -1.0, 0.1), ValidationError);
  EXPECT_THROW(AgedRisk(0.1, 1.0, -0.1), ValidationError);
  EXPECT_THROW(AgedRisk(1.1, 1.0, 0.1), ValidationError);
}

TEST(LinearRiskSum, Examples) {
  EXPECT_EQ(LinearRiskSum(std::vector<double>{}), 0.0);
  EXPECT_DOUBLE_EQ(LinearRiskSum(std::vector<double>{0.5, 0.5}), 1.0);
  EXPECT_NEAR(LinearRiskSum(std::vector<double>{0.1, 0.2, 0.3}), 0.6, 1e-15);
  EXPECT_THROW(LinearRiskSum(std::vector<double>{2.0}), ValidationError);
}

}  // namespace
}  // namespace riskbatch::riskmath
