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

#include "prefshap/valuation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "gtest/gtest.h"
#include "prefshap/alignment.h"
#include "prefshap/errors.h"
#include "prefshap/random.h"
#include "prefshap/synthgen.h"

namespace prefshap {
namespace {

// A utility given as a table over all 2^n coalitions.
struct TableUtility {
  int n;
  std::vector<std::vector<double>> table;
  std::vector<double> operator()(PlayerSet s) const { return table[s.bits()]; }
};

TableUtility RandomUtility(int n, int dims, Rng& rng) {
  std::normal_distribution<double> normal;
  TableUtility u{n, std::vector<std::vector<double>>(1u << n)};
  for (auto& row : u.table) {
    row.resize(dims);
    for (double& v : row) v = normal(rng);
  }
  return u;
}

// Average marginal contribution over all n! orderings.
Grid BruteForceShapley(const TableUtility& u) {
  const int dims = static_cast<int>(u.table[0].size());
  Grid phi(u.n, dims);
  std::vector<int> order(u.n);
  std::iota(order.begin(), order.end(), 0);
  double count = 0;
  do {
    std::uint64_t bits = 0;
    for (int i : order) {
      const std::uint64_t next = bits | (std::uint64_t{1} << i);
      for (int d = 0; d < dims; ++d) {
        phi(i, d) += u.table[next][d] - u.table[bits][d];
      }
      bits = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi.Flat()) v /= count;
  return phi;
}

TEST(Shapley, TwoPlayerExample) {
  const TableUtility u{2, {{0.0}, {1.0}, {2.0}, {4.0}}};
  const ShapleyResult r = ExactShapley(2, u);
  EXPECT_NEAR(r.values(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(r.values(1, 0), 2.5, 1e-15);
  EXPECT_EQ(r.coalitions_evaluated, 4u);
  const ShapleyResult reg = RegressionShapley(2, u, {});
  EXPECT_NEAR(reg.values(0, 0), 1.5, 1e-12);
  EXPECT_NEAR(reg.values(1, 0), 2.5, 1e-12);
}

TEST(Shapley, ExactMatchesBruteForce) {
  Rng rng = MakeRng(1);
  for (int n = 1; n <= 6; ++n) {
    const TableUtility u = RandomUtility(n, 2, rng);
    EXPECT_LE(MaxAbsDiff(ExactShapley(n, u).values, BruteForceShapley(u)), 1e-12);
    EXPECT_LE(MaxAbsDiff(ExactShapley(n, u, 3).values, BruteForceShapley(u)),
              1e-12);
  }
}

TEST(Shapley, AdditiveUtility) {
  const std::vector<double> c{0.5, -2.0, 3.25, 1.0};
  const UtilityFn u = [&](PlayerSet s) {
    double total = 0;
    for (int i : s.Members()) total += c[i];
    return std::vector<double>{total};
  };
  const ShapleyResult exact = ExactShapley(4, u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(exact.values(i, 0), c[i], 1e-15);
  const ShapleyResult reg = RegressionShapley(4, u, {12, 3, 1});
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(reg.values(i, 0), c[i], 1e-6);
}

TEST(ShapleyAxioms, EfficiencySymmetryDummyLinearity) {
  Rng rng = MakeRng(2);
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      TableUtility u = RandomUtility(n, 2, rng);
      // Efficiency.
      const ShapleyResult r = ExactShapley(n, u);
      for (int d = 0; d < 2; ++d) {
        double total = 0;
        for (int i = 0; i < n; ++i) total += r.values(i, d);
        EXPECT_LE(std::abs(total - (u.table.back()[d] - u.table[0][d])), 1e-9);
      }
      // Symmetry: make players 0 and 1 interchangeable.
      TableUtility sym = u;
      for (std::uint64_t b = 0; b < sym.table.size(); ++b) {
        if ((b & 1u) && !(b & 2u)) sym.table[b] = sym.table[(b & ~1ull) | 2u];
      }
      const ShapleyResult rs = ExactShapley(n, sym);
      for (int d = 0; d < 2; ++d) {
        EXPECT_LE(std::abs(rs.values(0, d) - rs.values(1, d)), 1e-12);
      }
      // Dummy: the last player never changes the utility.
      TableUtility dummy = u;
      const std::uint64_t last = std::uint64_t{1} << (n - 1);
      for (std::uint64_t b = 0; b < dummy.table.size(); ++b) {
        if (b & last) dummy.table[b] = dummy.table[b & ~last];
      }
      const ShapleyResult rd = ExactShapley(n, dummy);
      for (int d = 0; d < 2; ++d) EXPECT_LE(std::abs(rd.values(n - 1, d)), 1e-12);
      // Linearity.
      const TableUtility v = RandomUtility(n, 2, rng);
      const double a = 1.7, c = -0.6;
      TableUtility mix = u;
      for (std::size_t b = 0; b < mix.table.size(); ++b) {
        for (int d = 0; d < 2; ++d) {
          mix.table[b][d] = a * u.table[b][d] + c * v.table[b][d];
        }
      }
      const Grid pu = r.values, pv = ExactShapley(n, v).values;
      const Grid pm = ExactShapley(n, mix).values;
      for (std::size_t i = 0; i < pm.size(); ++i) {
        EXPECT_LE(std::abs(pm.Flat()[i] - (a * pu.Flat()[i] + c * pv.Flat()[i])),
                  1e-9);
      }
    }
  }
}

TEST(McPermutation, StratifiedEnumerationIsExact) {
  Rng rng = MakeRng(3);
  for (int n : {2, 3, 4}) {
    const TableUtility u = RandomUtility(n, 2, rng);
    int factorial = 1;
    for (int k = 2; k <= n; ++k) factorial *= k;
    McOptions options;
    options.num_permutations = factorial;
    options.stratified = true;
    const ShapleyResult r = McPermutationShapley(n, u, options);
    EXPECT_LE(MaxAbsDiff(r.values, BruteForceShapley(u)), 1e-12);
    ASSERT_TRUE(r.standard_error.has_value());
  }
}

TEST(McPermutation, DeterministicForSeed) {
  Rng rng = MakeRng(4);
  const TableUtility u = RandomUtility(5, 2, rng);
  McOptions options;
  options.num_permutations = 300;
  options.seed = 17;
  const ShapleyResult a = McPermutationShapley(5, u, options);
  options.jobs = 3;
  const ShapleyResult b = McPermutationShapley(5, u, options);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(*a.standard_error, *b.standard_error);
  options.seed = 18;
  EXPECT_NE(McPermutationShapley(5, u, options).values, a.values);
}

TEST(McPermutation, SinglePermutationHasUndefinedStandardError) {
  Rng rng = MakeRng(5);
  const TableUtility u = RandomUtility(3, 1, rng);
  McOptions options;
  options.num_permutations = 1;
  const ShapleyResult r = McPermutationShapley(3, u, options);
  EXPECT_TRUE(std::isnan((*r.standard_error)(0, 0)));
  // Efficiency holds along every single permutation.
  double total = 0;
  for (int i = 0; i < 3; ++i) total += r.values(i, 0);
  EXPECT_NEAR(total, u.table.back()[0] - u.table[0][0], 1e-12);
}

TEST(McPermutation, CoverageOfThreeStandardErrors) {
  Rng rng = MakeRng(6);
  const TableUtility u = RandomUtility(4, 1, rng);
  const Grid exact = BruteForceShapley(u);
  int inside = 0, within_one = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    McOptions options;
    options.num_permutations = 2000;
    options.seed = seed;
    const ShapleyResult r = McPermutationShapley(4, u, options);
    for (int i = 0; i < 4; ++i) {
      ++total;
      const double err = std::abs(r.values(i, 0) - exact(i, 0));
      inside += err <= 3 * (*r.standard_error)(i, 0);
      within_one += err <= (*r.standard_error)(i, 0);
    }
  }
  EXPECT_GE(static_cast<double>(inside) / total, 0.95);
  // A calibrated standard error puts roughly 68% of errors inside one unit.
  EXPECT_GT(static_cast<double>(within_one) / total, 0.5);
  EXPECT_LT(static_cast<double>(within_one) / total, 0.85);
}

TEST(McPermutation, UnbiasedAcrossSeeds) {
  Rng rng = MakeRng(7);
  const TableUtility u = RandomUtility(4, 1, rng);
  const Grid exact = BruteForceShapley(u);
  constexpr int kSeeds = 1000;
  std::vector<double> sum(4), sum2(4);
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    McOptions options;
    options.num_permutations = 5;
    options.seed = seed;
    const ShapleyResult r = McPermutationShapley(4, u, options);
    for (int i = 0; i < 4; ++i) {
      sum[i] += r.values(i, 0);
      sum2[i] += r.values(i, 0) * r.values(i, 0);
    }
  }
  for (int i = 0; i < 4; ++i) {
    const double mean = sum[i] / kSeeds;
    const double sd = std::sqrt(sum2[i] / kSeeds - mean * mean);
    EXPECT_LE(std::abs(mean - exact(i, 0)), 3 * sd / std::sqrt(kSeeds));
  }
}

TEST(Regression, FullEnumerationMatchesExact) {
  Rng rng = MakeRng(8);
  for (int n = 1; n <= 6; ++n) {
    const TableUtility u = RandomUtility(n, 2, rng);
    const ShapleyResult r = RegressionShapley(n, u, {});
    EXPECT_LE(MaxAbsDiff(r.values, BruteForceShapley(u)), 1e-6) << "n=" << n;
    EXPECT_EQ(r.num_samples, 0);
  }
}

TEST(Regression, SampledRespectsEfficiency) {
  Rng rng = MakeRng(9);
  const TableUtility u = RandomUtility(5, 1, rng);
  const ShapleyResult r = RegressionShapley(5, u, {200, 1, 1});
  double total = 0;
  for (int i = 0; i < 5; ++i) total += r.values(i, 0);
  EXPECT_NEAR(total, u.table.back()[0] - u.table[0][0], 1e-9);
  EXPECT_LE(MaxAbsDiff(r.values, BruteForceShapley(u)), 1.0);
}

TEST(Regression, TooFewSamplesIsRankDeficient) {
  Rng rng = MakeRng(10);
  const TableUtility u = RandomUtility(5, 1, rng);
  EXPECT_THROW(RegressionShapley(5, u, {1, 0, 1}), RankDeficiencyError);
}

TEST(UtilityCacheTest, ComputesEachKeyOnce) {
  UtilityCache cache;
  std::atomic<int> calls = 0;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      cache.GetOrCompute("k", [&] {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        return std::vector<double>{1.0};
      });
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(cache.oracle_calls(), 1u);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(UtilityCacheTest, FailuresAreNotCached) {
  UtilityCache cache;
  EXPECT_THROW(cache.GetOrCompute(
                   "k", []() -> std::vector<double> { throw DomainError("x"); }),
               DomainError);
  EXPECT_FALSE(cache.Find("k").has_value());
  EXPECT_EQ(cache.GetOrCompute("k", [] { return std::vector<double>{2.0}; }),
            std::vector<double>{2.0});
}

TEST(UtilityCacheTest, CachedUtilityWrapsErrors) {
  UtilityCache cache;
  const UtilityFn u = CachedUtility(cache, {"a", "b"}, [](PlayerSet s) {
    if (s.bits() == 3) throw DomainError("bad");
    return std::vector<double>{static_cast<double>(s.size())};
  });
  try {
    ExactShapley(2, u);
    FAIL() << "expected OracleError";
  } catch (const OracleError& e) {
    EXPECT_EQ(e.coalition(), "[a,b]");
  }
}

struct ProviderSetup {
  SyntheticWorld sw;
  std::map<std::string, Policy> policies;
};

ProviderSetup MakeProviderSetup(int n, std::uint64_t seed) {
  WorldSpec spec;
  spec.num_sources = n;
  spec.seed = seed;
  ProviderSetup s{MakeRandomWorld(spec), {}};
  for (int i = 0; i < n; ++i) {
    s.policies.emplace(s.sw.source_ids[i],
                       ExactAlignedPolicy(s.sw.reference, s.sw.truth_rewards[i], 0.1));
  }
  return s;
}

TEST(PolicyValueTest, Examples) {
  const WorldPtr w = World::Uniform({"x"}, {"a", "b"});
  const RewardTable r(w, Grid::FromRows({{1.0, 0.0}}));
  EXPECT_NEAR(PolicyValue(UniformPolicy(w), r), 0.5, 1e-15);

  const auto w2 = std::make_shared<const World>(
      std::vector<std::string>{"x0", "x1"}, std::vector<std::string>{"a", "b"},
      std::vector<double>{0.25, 0.75});
  const RewardTable r2(w2, Grid::FromRows({{1.0, 3.0}, {-2.0, 5.0}}));
  const Policy argmax(w2, Grid::FromRows({{-INFINITY, 0.0}, {-INFINITY, 0.0}}));
  EXPECT_NEAR(PolicyValue(argmax, r2), 0.25 * 3.0 + 0.75 * 5.0, 1e-15);
}

TEST(PolicyValueTest, SampledModeApproachesExact) {
  const ProviderSetup s = MakeProviderSetup(1, 3);
  const Policy& p = s.policies.begin()->second;
  const RewardTable& r = s.sw.eval_rewards[0];
  const double exact = PolicyValue(p, r);
  const double a = PolicyValue(p, r, SampledValue{100000, 1});
  EXPECT_EQ(a, PolicyValue(p, r, SampledValue{100000, 1}));
  EXPECT_NEAR(a, exact, 0.01);
}

TEST(CoalitionUtilityTest, CacheEconomyAtFourSources) {
  const ProviderSetup s = MakeProviderSetup(4, 4);
  const auto provider = CoalitionModelProvider::Composed(s.sw.reference, s.policies);
  UtilityCache cache;
  const UtilityFn u = ProviderUtility(cache, provider, s.sw.eval_rewards);
  const ShapleyResult exact = ExactShapley(4, u);
  EXPECT_EQ(cache.oracle_calls(), 16u);
  EXPECT_EQ(cache.size(), 16u);
  McOptions options;
  options.num_permutations = 500;
  McPermutationShapley(4, u, options);
  RegressionShapley(4, u, {});
  EXPECT_EQ(cache.oracle_calls(), 16u);

  const Coalition c = Coalition::FromIds({"s0", "s2"});
  const auto first = CoalitionUtility(cache, provider, c, s.sw.eval_rewards);
  EXPECT_EQ(CoalitionUtility(cache, provider, c, s.sw.eval_rewards), first);
  EXPECT_EQ(cache.oracle_calls(), 16u);
  EXPECT_NEAR(first[0], PolicyValue(ComposeCoalition(provider, c),
                                    s.sw.eval_rewards[0]),
              1e-15);
}

TEST(CoalitionUtilityTest, ReferenceCopySourceIsDummy) {
  ProviderSetup s = MakeProviderSetup(3, 5);
  s.policies.insert_or_assign("s1", s.sw.reference);
  const auto provider = CoalitionModelProvider::Composed(s.sw.reference, s.policies);
  UtilityCache cache;
  const ShapleyResult r =
      ExactShapley(3, ProviderUtility(cache, provider, s.sw.eval_rewards));
  EXPECT_LE(std::abs(r.values(1, 0)), 1e-12);
  EXPECT_LE(std::abs(r.values(1, 1)), 1e-12);
}

TEST(Signature, ShapeDiagonalAndCsv) {
  ShapleyResult r;
  r.values = Grid::FromRows({{0.5, 0.5}, {-1.25, 2.0}, {0.0, -0.1}, {3, 3}});
  const SpatialSignature sig =
      MakeSpatialSignature(r, {"s0", "s1", "s2", "s3"}, {"help", "harm"});
  ASSERT_EQ(sig.rows.size(), 4u);
  EXPECT_EQ(sig.rows[0].coords.size(), 2u);
  EXPECT_EQ(sig.rows[0].diagonal_gap, 0.0);
  EXPECT_EQ(sig.rows[1].diagonal_gap, 3.25);
  EXPECT_EQ(SignatureToCsv(sig),
            "source,help,harm\ns0,0.5,0.5\ns1,-1.25,2\ns2,0,-0.1\ns3,3,3\n");
  EXPECT_THROW(MakeSpatialSignature(r, {"s0"}, {"help", "harm"}),
               InvalidInputError);
}

TEST(Signature, IdenticalRewardsLieOnDiagonal) {
  const ProviderSetup s = MakeProviderSetup(4, 6);
  const auto provider = CoalitionModelProvider::Composed(s.sw.reference, s.policies);
  UtilityCache cache;
  const std::vector<RewardTable> same{s.sw.eval_rewards[0], s.sw.eval_rewards[0]};
  const ShapleyResult r = ExactShapley(4, ProviderUtility(cache, provider, same));
  for (const auto& row :
       MakeSpatialSignature(r, provider.source_ids(), {"a", "b"}).rows) {
    EXPECT_EQ(row.diagonal_gap, 0.0);
  }
}

TEST(Estimators, ParseAndPrint) {
  EXPECT_EQ(ParseEstimator("mc"), Estimator::kMcPermutation);
  EXPECT_EQ(ParseEstimator(ToString(Estimator::kRegression)),
            Estimator::kRegression);
  EXPECT_THROW(ParseEstimator("bogus"), InvalidInputError);
  EXPECT_EQ(PlayerSet(5).ToString(), "{0,2}");
}

}  // namespace
}  // namespace prefshap
