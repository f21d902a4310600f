// Copyright 2026 The Authors.
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

#include "stoq/objectives.h"

#include "gtest/gtest.h"
#include "oracles.h"

namespace stoq {
namespace {

TEST(EvaluateTest, LinearAndCoverage) {
  const Objective lin = Objective::Linear({1, 2, 3});
  // Element ids are 0-based: w_0 + w_2 = 1 + 3.
  EXPECT_DOUBLE_EQ(lin.Evaluate(Subset(3, {0, 2})), 4.0);
  EXPECT_DOUBLE_EQ(lin.Evaluate(Subset(3, {1, 2})), 5.0);
  EXPECT_DOUBLE_EQ(lin.Evaluate(Subset(3)), 0.0);
  // Items a=0, b=1, c=2.
  const Objective cov = Objective::Coverage({{0, 1}, {1, 2}}, 3);
  EXPECT_DOUBLE_EQ(cov.Evaluate(Subset(2, {0, 1})), 3.0);
  EXPECT_DOUBLE_EQ(cov.Evaluate(Subset(2)), 0.0);
  EXPECT_THROW(lin.Evaluate(Subset(4)), std::invalid_argument);
}

TEST(EvaluateTest, RejectsBadParameters) {
  EXPECT_THROW(Objective::Linear({1, -1}), std::invalid_argument);
  EXPECT_THROW(Objective::Coverage({{64}}, 65), std::invalid_argument);
  EXPECT_THROW(Objective::Table(2, {0, 1, 1}), std::invalid_argument);
}

TEST(MarginalGainTest, Examples) {
  EXPECT_DOUBLE_EQ(MarginalGain(Objective::Linear({1, 2}), Subset(2), 1), 2.0);
  const Objective cov = Objective::Coverage({{0, 1}, {1}}, 2);
  EXPECT_DOUBLE_EQ(MarginalGain(cov, Subset(2, {0}), 1), 0.0);
  // Table indexed by mask: f({}), f({0}), f({1}), f({0,1}).
  const Objective t = Objective::Table(2, {0.0, 1.0, 1.0, 1.5});
  EXPECT_DOUBLE_EQ(MarginalGain(t, Subset(2, {0}), 1), 0.5);
  EXPECT_THROW(MarginalGain(t, Subset(2, {0}), 0), std::invalid_argument);
}

TEST(AxiomsTest, ShippedKindsPass) {
  EXPECT_TRUE(CheckAxioms(Objective::Linear({0, 1, 2.5})).all());
  EXPECT_TRUE(CheckAxioms(Objective::Coverage({{0, 1}, {1, 2}, {3}}, 4)).all());
}

TEST(AxiomsTest, IncreasingGainIsNotSubmodular) {
  const Objective t = Objective::Table(2, {0.0, 0.0, 0.0, 2.0});
  const AxiomReport r = CheckAxioms(t);
  EXPECT_TRUE(r.normalized);
  EXPECT_TRUE(r.monotone);
  EXPECT_FALSE(r.submodular);
}

TEST(AxiomsTest, DetectsNonMonotoneAndNonNormalized) {
  EXPECT_FALSE(CheckAxioms(Objective::Table(1, {0.0, -1.0})).monotone);
  EXPECT_FALSE(CheckAxioms(Objective::Table(1, {1.0, 2.0})).normalized);
}

TEST(AxiomsTest, TooLarge) {
  EXPECT_THROW(CheckAxioms(Objective::Linear(std::vector<double>(21, 1.0))),
               TooLargeError);
}

// Random instances of every shipped kind, and their restrictions, satisfy
// all three axioms; values agree with the direct definitions.
TEST(AxiomsTest, RandomInstancesProperty) {
  oracle::Gen g(11);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = g.Int(1, 10);
    const auto w = g.Weights(n, 0.0, 5.0);
    const auto covers = g.Covers(n, g.Int(1, 12), 0.3);
    const Objective lin = Objective::Linear(w);
    const Objective cov = Objective::Coverage(covers, 12);
    EXPECT_TRUE(CheckAxioms(lin).all());
    EXPECT_TRUE(CheckAxioms(cov).all());
    const Subset mask = Subset::FromMask(n, g.Raw() & FullMask(n));
    EXPECT_TRUE(CheckAxioms(RestrictedObjective(cov, mask)).all());
    EXPECT_TRUE(CheckAxioms(RestrictedObjective(lin, mask)).all());
    for (int probe = 0; probe < 8; ++probe) {
      const uint64_t m = g.Raw() & FullMask(n);
      EXPECT_NEAR(lin.EvaluateMask(m), oracle::Linear(w, m), 1e-9);
      EXPECT_NEAR(cov.EvaluateMask(m), oracle::Coverage(covers, m), 1e-9);
      EXPECT_NEAR(RestrictedObjective(cov, mask).EvaluateMask(m),
                  oracle::Coverage(covers, m & mask.mask()), 1e-9);
    }
  }
}

TEST(RestrictedTest, ModularWeightsZeroOutsideMask) {
  const Objective lin = Objective::Linear({1, 2, 3});
  const auto w = RestrictedObjective(lin, Subset(3, {1})).ModularWeights();
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, (std::vector<double>{0, 2, 0}));
  EXPECT_FALSE(RestrictedObjective(Objective::Coverage({{0}}, 1), Subset(1))
                   .ModularWeights()
                   .has_value());
}

TEST(CoveringLemmaTest, LinearIsTight) {
  const Objective lin = Objective::Linear({1, 4, 2, 0.5});
  EXPECT_NEAR(VerifyCoveringLemma(lin, 0.3), 0.0, 1e-9);
  EXPECT_NEAR(VerifyCoveringComplementLemma(lin, 0.4), 0.0, 1e-9);
}

TEST(CoveringLemmaTest, ZeroFunctionAndZeroBeta) {
  const Objective zero = Objective::Linear({0, 0, 0});
  EXPECT_NEAR(VerifyCoveringLemma(zero, 0.5), 0.0, 1e-12);
  const Objective cov = Objective::Coverage({{0, 1}, {1, 2}}, 3);
  EXPECT_NEAR(VerifyCoveringComplementLemma(cov, 0.0), 0.0, 1e-12);
}

TEST(CoveringLemmaTest, MarginalPreconditions) {
  const Objective lin = Objective::Linear({1, 1});
  EXPECT_THROW(VerifyCoveringLemma(lin, std::vector<double>{0.2, 0.5}, 0.3),
               std::invalid_argument);
  EXPECT_THROW(
      VerifyCoveringComplementLemma(lin, std::vector<double>{0.2, 0.5}, 0.3),
      std::invalid_argument);
  EXPECT_THROW(VerifyCoveringLemma(Objective::Linear(std::vector<double>(16, 1)), 0.5),
               TooLargeError);
}

// Coverage on 8 elements: both slacks agree with a direct enumeration oracle
// and are nonnegative.
TEST(CoveringLemmaTest, CoverageMatchesOracle) {
  oracle::Gen g(8);
  const auto covers = g.Covers(8, 10, 0.35);
  const Objective cov = Objective::Coverage(covers, 10);
  const std::vector<double> q(8, 0.3);
  const double fe = oracle::Coverage(covers, 0xFF);
  const double es = oracle::Expectation(
      q, [&](uint64_t m) { return oracle::Coverage(covers, m); });
  const double slack = VerifyCoveringLemma(cov, 0.3);
  EXPECT_NEAR(slack, es - 0.3 * fe, 1e-9);
  EXPECT_GE(slack, -1e-9);

  const std::vector<double> qb(8, 0.4);
  const double loss = oracle::Expectation(qb, [&](uint64_t t) {
    return fe - oracle::Coverage(covers, 0xFF & ~t);
  });
  const double slack_b = VerifyCoveringComplementLemma(cov, 0.4);
  EXPECT_NEAR(slack_b, 0.4 * fe - loss, 1e-9);
  EXPECT_GE(slack_b, -1e-9);
}

// Random coverage objectives with random marginals at or above / below the
// stated bound.
TEST(CoveringLemmaTest, RandomCoverageProperty) {
  oracle::Gen g(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.Int(1, 10);
    const Objective cov = Objective::Coverage(g.Covers(n, 12, 0.3), 12);
    const double alpha = g.Real(0.05, 0.9);
    std::vector<double> lo(n), hi(n);
    for (int e = 0; e < n; ++e) {
      lo[e] = g.Real(alpha, 1.0);
      hi[e] = g.Real(0.0, alpha);
    }
    EXPECT_GE(VerifyCoveringLemma(cov, lo, alpha), -1e-9);
    EXPECT_GE(VerifyCoveringComplementLemma(cov, hi, alpha), -1e-9);
  }
}

TEST(ObjectiveJsonTest, RoundTrip) {
  const Objective lin = Objective::Linear({1, 2});
  EXPECT_EQ(Objective::FromJson(lin.ToJson()).ToJson(), lin.ToJson());
  const Objective cov = Objective::Coverage({{0, 1}, {1}}, std::vector<double>{2, 3});
  const Objective back = Objective::FromJson(cov.ToJson());
  EXPECT_DOUBLE_EQ(back.Evaluate(Subset(2, {0, 1})), 5.0);
  const Objective t = Objective::Table(1, {0, 3});
  EXPECT_DOUBLE_EQ(Objective::FromJson(t.ToJson()).EvaluateMask(1), 3.0);
  EXPECT_THROW(Objective::FromJson({{"kind", "cubic"}}), std::invalid_argument);
}

}  // namespace
}  // namespace stoq
