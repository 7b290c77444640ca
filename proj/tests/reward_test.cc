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

#include "prefshap/reward.h"

#include <cmath>
#include <functional>

#include "gtest/gtest.h"
#include "prefshap/alignment.h"
#include "prefshap/errors.h"
#include "prefshap/random.h"

namespace prefshap {
namespace {

// Root of a decreasing function on [lo, hi] by bisection.
double Bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double Sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Two responses per prompt: with gauge-fixed rewards (d/2, -d/2) the
// penalized log-likelihood has derivative wins*sig(-d) - losses*sig(d) - l2*d/2.
double TwoResponseOracle(double wins, double losses, double l2) {
  return Bisect(
      [&](double d) { return wins * Sig(-d) - losses * Sig(d) - l2 * d / 2; },
      -100.0, 100.0);
}

PreferenceDataset Repeated(const WorldPtr& w, int ab, int ba) {
  std::vector<PreferenceTriple> t;
  for (int i = 0; i < ab; ++i) t.push_back({0, 0, 1});
  for (int i = 0; i < ba; ++i) t.push_back({0, 1, 0});
  return PreferenceDataset(w, "s", t);
}

TEST(Reward, LogLikelihoodOfConstantRewardIsLogHalf) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const auto data = Repeated(w, 3, 1);
  EXPECT_NEAR(BtLogLikelihood(RewardTable::Zero(w), data), 4 * std::log(0.5),
              1e-14);
}

TEST(Reward, LogLikelihoodSaturatesAndMatchesLogSigmoid) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const auto data = Repeated(w, 3, 0);
  const RewardTable wide(w, Grid::FromRows({{20.0, 0.0}}));
  EXPECT_NEAR(BtLogLikelihood(wide, data), 0.0, 1e-8);
  const RewardTable unit(w, Grid::FromRows({{1.0, 0.0}}));
  EXPECT_NEAR(BtLogLikelihood(unit, Repeated(w, 1, 0)),
              -std::log1p(std::exp(-1.0)), 1e-15);
}

TEST(Reward, ImplicitRewardExamples) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const Policy ref = UniformPolicy(w);
  const RewardTable zero = ImplicitReward(ref, ref, 0.1);
  EXPECT_EQ(zero(0, 0), 0.0);
  EXPECT_EQ(zero(0, 1), 0.0);
  const RewardTable r = ImplicitReward(
      ExactAlignedPolicy(ref, RewardTable(w, Grid::FromRows({{1.0, 0.0}})), 1.0),
      ref, 1.0);
  EXPECT_NEAR(r(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r(0, 1), -0.5, 1e-15);
}

TEST(Reward, ThreeToOneFitsLogThree) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const auto data = Repeated(w, 3, 1);
  const RewardTable unpenalized = FitBtReward(data, 0.0);
  EXPECT_NEAR(unpenalized(0, 0) - unpenalized(0, 1), std::log(3.0), 1e-7);
  EXPECT_NEAR(unpenalized(0, 0) - unpenalized(0, 1),
              TwoResponseOracle(3, 1, 0.0), 1e-7);
  const RewardTable fit = FitBtReward(data);
  EXPECT_NEAR(fit(0, 0) - fit(0, 1), TwoResponseOracle(3, 1, kDefaultL2),
              1e-7);
  EXPECT_NEAR(fit(0, 0) + fit(0, 1), 0.0, 1e-12);
  EXPECT_EQ(fit.gauge(), Gauge::kZeroMeanPerPrompt);
}

TEST(Reward, BalancedDataFitsZero) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const RewardTable fit = FitBtReward(Repeated(w, 5, 5));
  EXPECT_NEAR(fit(0, 0), 0.0, 1e-10);
  EXPECT_NEAR(fit(0, 1), 0.0, 1e-10);
}

TEST(Reward, SeparableDataStaysFinite) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const RewardTable fit = FitBtReward(Repeated(w, 10, 0));
  const double d = fit(0, 0) - fit(0, 1);
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_NEAR(d, TwoResponseOracle(10, 0, kDefaultL2), 1e-6);
  EXPECT_GT(d, 5.0);
}

TEST(Reward, FitSatisfiesScoreEquations) {
  const WorldPtr w =
      World::Uniform({"x0", "x1"}, {"a", "b", "c", "d"});
  Rng rng = MakeRng(5);
  std::uniform_int_distribution<std::size_t> px(0, 1), py(0, 3);
  std::vector<PreferenceTriple> t;
  while (t.size() < 300) {
    const std::size_t a = py(rng), b = py(rng);
    if (a != b) t.push_back({px(rng), a, b});
  }
  const PreferenceDataset data(w, "s", t);
  const RewardTable fit = FitBtReward(data);
  Grid score(2, 4);
  for (const auto& p : t) {
    const double g = Sig(-(fit(p.prompt, p.chosen) - fit(p.prompt, p.rejected)));
    score(p.prompt, p.chosen) += g;
    score(p.prompt, p.rejected) -= g;
  }
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 4; ++y) {
      EXPECT_NEAR(score(x, y) - kDefaultL2 * fit(x, y), 0.0, 1e-7);
    }
  }
}

TEST(Reward, PrefProbValues) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const RewardTable r(w, Grid::FromRows({{std::log(3.0), 0.0}}));
  EXPECT_NEAR(PrefProb(r, "x", "a", "b"), 0.75, 1e-15);
  EXPECT_NEAR(PrefProb(r, 0, 1, 0), 0.25, 1e-15);
  const RewardTable big(w, Grid::FromRows({{40.0, -3.0}}));
  EXPECT_EQ(PrefProb(big, 0, 0, 1) + PrefProb(big, 0, 1, 0), 1.0);
  for (double d = -30; d <= 30; d += 0.37) {
    const RewardTable rr(w, Grid::FromRows({{d, 0.0}}));
    EXPECT_NEAR(PrefProb(rr, 0, 0, 1) + PrefProb(rr, 0, 1, 0), 1.0, 1e-15);
  }
}

TEST(Reward, GaugeFixingIsIdempotent) {
  const WorldPtr w = World::Uniform({"x0", "x1"}, {"a", "b", "c"});
  const RewardTable r(w, Grid::FromRows({{1, 2, 6}, {-4, 0, 1}}));
  const RewardTable g = r.GaugeFixed();
  EXPECT_NEAR(g(0, 0), -2.0, 1e-15);
  EXPECT_NEAR(g(1, 2), 2.0, 1e-15);
  EXPECT_EQ(g.GaugeFixed().values(), g.values());
  EXPECT_THROW(RewardTable(w, r.values(), Gauge::kZeroMeanPerPrompt),
               InvalidInputError);
}

TEST(Reward, ImplicitRewardRoundTrip) {
  const WorldPtr w = World::Uniform({"x0", "x1", "x2"}, {"a", "b", "c", "d"});
  Rng rng = MakeRng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Grid logits(3, 4), values(3, 4);
    for (double& v : logits.Flat()) v = normal(rng);
    for (double& v : values.Flat()) v = 2.0 * normal(rng);
    const Policy ref = SoftmaxPolicyFromLogits(w, logits);
    const RewardTable truth = RewardTable(w, values).GaugeFixed();
    for (double beta : {0.05, 0.1, 1.0}) {
      const Policy aligned = ExactAlignedPolicy(ref, truth, beta);
      EXPECT_LE(MaxAbsDiff(ImplicitReward(aligned, ref, beta).values(),
                           truth.values()),
                1e-8);
    }
  }
}

TEST(Reward, ImplicitRewardRejectsSupportMismatch) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const Policy uni = UniformPolicy(w);
  const Policy det(w, Grid::FromRows({{0.0, -INFINITY}}));
  EXPECT_THROW(ImplicitReward(uni, det, 0.1), DomainError);
  EXPECT_THROW(ImplicitReward(det, uni, 0.1), DomainError);
  EXPECT_NO_THROW(ImplicitReward(det, det, 0.1));
}

TEST(Reward, DatasetValidation) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  EXPECT_THROW(PreferenceDataset(w, "s", {{0, 0, 0}}), InvalidInputError);
  EXPECT_THROW(PreferenceDataset(w, "s", {{1, 0, 1}}), LookupError);
  EXPECT_THROW(PreferenceDataset::FromNames(w, "s", {{"x", "a", "zz"}}),
               LookupError);
  EXPECT_THROW(FitBtReward(PreferenceDataset(w, "s", {})), InvalidInputError);
}

TEST(Reward, AggregatePairsCountsMultiplicity) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const auto pairs = AggregatePairs(Repeated(w, 3, 1));
  ASSERT_EQ(pairs.size(), 2u);
  double total = 0;
  for (const auto& p : pairs) total += p.count;
  EXPECT_EQ(total, 4.0);
}

}  // namespace
}  // namespace prefshap
