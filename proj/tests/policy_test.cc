/*
 * Copyright 2026 The prefshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "prefshap/policy.h"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "prefshap/errors.h"
#include "prefshap/random.h"

namespace prefshap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

WorldPtr TwoByTwo() { return World::Uniform({"x0", "x1"}, {"a", "b"}); }

TEST(Policy, SoftmaxOfEqualLogitsIsUniform) {
  const Policy p = SoftmaxPolicyFromLogits(
      TwoByTwo(), Grid::FromRows({{0.0, 0.0}, {0.0, 0.0}}));
  EXPECT_NEAR(p.Prob(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p.Prob(1, 1), 0.5, 1e-15);
}

TEST(Policy, SoftmaxOfUnitGap) {
  const Policy p = SoftmaxPolicyFromLogits(
      TwoByTwo(), Grid::FromRows({{1.0, 0.0}, {0.0, 0.0}}));
  const double expected = std::exp(1.0) / (std::exp(1.0) + 1.0);
  EXPECT_NEAR(p.Prob(0, 0), expected, 1e-15);
  EXPECT_NEAR(p.Prob(0, 1), 1.0 - expected, 1e-15);
  EXPECT_NEAR(p.Prob(0, 0), 0.7311, 1e-4);
  EXPECT_NEAR(LogProb(p, "x0", "a"), 1.0 - std::log(std::exp(1.0) + 1.0),
              1e-14);
}

TEST(Policy, SoftmaxIsShiftInvariant) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b", "c"});
  const Policy p = SoftmaxPolicyFromLogits(w, Grid::FromRows({{0.3, -1.2, 2.0}}));
  const Policy q =
      SoftmaxPolicyFromLogits(w, Grid::FromRows({{100.3, 98.8, 102.0}}));
  EXPECT_LE(MaxAbsDiff(p.log_probs(), q.log_probs()), 1e-12);
}

TEST(Policy, DeterministicPolicyHasMinusInfinity) {
  const WorldPtr w = TwoByTwo();
  const Policy p(w, Grid::FromRows({{0.0, -kInf}, {-kInf, 0.0}}));
  EXPECT_EQ(p.LogProb(0, 0), 0.0);
  EXPECT_EQ(p.LogProb(0, 1), -kInf);
  EXPECT_EQ(p.Prob(0, 1), 0.0);
  EXPECT_FALSE(p.HasFullSupport());
}

TEST(Policy, RejectsUnnormalizedRows) {
  EXPECT_THROW(Policy(TwoByTwo(), Grid::FromRows({{0.0, 0.0}, {0.0, -kInf}})),
               InvalidInputError);
  EXPECT_THROW(Policy(TwoByTwo(), Grid::FromRows({{NAN, 0.0}, {0.0, -kInf}})),
               InvalidInputError);
}

TEST(Policy, FromScoresRejectsEmptySupport) {
  EXPECT_THROW(
      Policy::FromScores(TwoByTwo(), Grid::FromRows({{-kInf, -kInf}, {0, 0}})),
      DegenerateSupportError);
}

TEST(Policy, SoftmaxRejectsInfiniteLogits) {
  EXPECT_THROW(
      SoftmaxPolicyFromLogits(TwoByTwo(), Grid::FromRows({{kInf, 0}, {0, 0}})),
      InvalidInputError);
}

TEST(Policy, LogSigmoidValues) {
  EXPECT_NEAR(LogSigmoid(1.0), -std::log1p(std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(LogSigmoid(1.0), -0.3133, 1e-4);
  EXPECT_NEAR(LogSigmoid(-800.0), -800.0, 1e-12);
  EXPECT_NEAR(LogSigmoid(800.0), 0.0, 1e-300);
  EXPECT_NEAR(Sigmoid(0.0), 0.5, 1e-16);
}

TEST(Policy, LogSumExpHandlesInfinities) {
  const double v[] = {-kInf, -kInf};
  EXPECT_EQ(LogSumExp(v), -kInf);
  const double u[] = {1000.0, 1000.0};
  EXPECT_NEAR(LogSumExp(u), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Policy, KlOfDeterministicAgainstUniformIsLogTwo) {
  const WorldPtr w = TwoByTwo();
  const Policy det(w, Grid::FromRows({{0.0, -kInf}, {0.0, -kInf}}));
  const Policy uni = UniformPolicy(w);
  EXPECT_NEAR(KlDivergence(det, uni, 0), std::log(2.0), 1e-15);
  EXPECT_NEAR(KlDivergence(det, uni, "x1"), std::log(2.0), 1e-15);
  EXPECT_THROW(KlDivergence(uni, det, 0), DomainError);
}

TEST(Policy, KlIsNonNegativeAndZeroOnSelf) {
  const WorldPtr w = World::Uniform({"x0", "x1", "x2"}, {"a", "b", "c", "d"});
  Rng rng = MakeRng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    Grid a(3, 4), b(3, 4);
    for (double& v : a.Flat()) v = 3.0 * normal(rng);
    for (double& v : b.Flat()) v = 3.0 * normal(rng);
    const Policy p = SoftmaxPolicyFromLogits(w, a);
    const Policy q = SoftmaxPolicyFromLogits(w, b);
    for (std::size_t x = 0; x < 3; ++x) {
      EXPECT_GE(KlDivergence(p, q, x), 0.0);
      EXPECT_EQ(KlDivergence(p, p, x), 0.0);
      const double tv = TotalVariation(p, q, x);
      EXPECT_GE(tv, 0.0);
      EXPECT_LE(tv, 1.0);
      // Pinsker.
      EXPECT_LE(tv, std::sqrt(KlDivergence(p, q, x) / 2.0) + 1e-12);
    }
  }
}

TEST(Policy, SamplingFrequencyMatchesProbability) {
  const Policy p = UniformPolicy(TwoByTwo());
  Rng rng = MakeRng(123);
  int hits = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) hits += SampleResponse(p, 0, rng) == 0;
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, 0.5, 0.01);
}

TEST(Policy, SamplingIsReproducible) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b", "c"});
  const Policy p =
      SoftmaxPolicyFromLogits(w, Grid::FromRows({{0.1, 0.7, -0.4}}));
  Rng r1 = MakeRng(99), r2 = MakeRng(99);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(SampleResponse(p, "x", r1), SampleResponse(p, "x", r2));
  }
}

TEST(Policy, SamplingNeverDrawsZeroProbability) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b", "c"});
  const Policy p(w, Grid::FromRows({{std::log(0.5), -kInf, std::log(0.5)}}));
  Rng rng = MakeRng(1);
  for (int i = 0; i < 5000; ++i) ASSERT_NE(SampleResponse(p, 0, rng), 1u);
}

TEST(World, ValidatesInputs) {
  EXPECT_THROW(World({}, {"a"}, {}), InvalidInputError);
  EXPECT_THROW(World({"x", "x"}, {"a"}, {0.5, 0.5}), InvalidInputError);
  EXPECT_THROW(World({"x", "y"}, {"a"}, {0.5, 0.6}), InvalidInputError);
  EXPECT_THROW(World({"x", "y"}, {"a"}, {1.5, -0.5}), InvalidInputError);
  const World w({"x", "y"}, {"a", "b"}, {0.25, 0.75});
  EXPECT_EQ(w.PromptIndex("y"), 1u);
  EXPECT_THROW(w.ResponseIndex("zz"), LookupError);
}

}  // namespace
}  // namespace prefshap
