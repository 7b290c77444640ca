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

#include "prefshap/io.h"

#include <filesystem>

#include "gtest/gtest.h"
#include "manifest.h"
#include "prefshap/errors.h"
#include "prefshap/synthgen.h"

namespace prefshap {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("prefshap_io_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(IoTest, WorldRoundTrip) {
  const SyntheticWorld sw = MakeRandomWorld({});
  SaveWorld(*sw.world, dir_ / "world.json");
  EXPECT_EQ(*LoadWorld(dir_ / "world.json"), *sw.world);
}

TEST_F(IoTest, PolicyRoundTripKeepsZeros) {
  const WorldPtr w = World::Uniform({"x0", "x1"}, {"a", "b", "c"});
  const Policy p(w, Grid::FromRows({{0.0, -INFINITY, -INFINITY},
                                    {std::log(0.3), std::log(0.7), -INFINITY}}));
  SavePolicy(p, dir_ / "p.json", "s0");
  const Policy q = LoadPolicy(dir_ / "p.json", w);
  EXPECT_EQ(p.log_probs(), q.log_probs());
  EXPECT_EQ(PolicyToJson(p, "s0")["source"], "s0");
}

TEST_F(IoTest, RewardRoundTrip) {
  const SyntheticWorld sw = MakeRandomWorld({});
  SaveRewardTable(sw.truth_rewards[1], dir_ / "r.json");
  const RewardTable r = LoadRewardTable(dir_ / "r.json", sw.world);
  EXPECT_EQ(r.values(), sw.truth_rewards[1].values());
  EXPECT_EQ(r.gauge(), Gauge::kZeroMeanPerPrompt);
}

TEST_F(IoTest, DatasetRoundTripAndNamedIds) {
  const SyntheticWorld sw = MakeRandomWorld({});
  const PreferenceDataset d = GeneratePreferences(sw.truth_rewards[0], 100, 4, "s0");
  SaveDataset(d, dir_ / "d.jsonl");
  EXPECT_EQ(LoadDataset(dir_ / "d.jsonl", sw.world, "s0").triples(), d.triples());

  WriteFile(dir_ / "named.jsonl",
            "{\"prompt\": \"p1\", \"chosen\": \"r2\", \"rejected\": \"r0\"}\n\n"
            "{\"prompt\": 0, \"chosen\": 4, \"rejected\": 3}\n");
  const PreferenceDataset n = LoadDataset(dir_ / "named.jsonl", sw.world, "x");
  ASSERT_EQ(n.size(), 2u);
  EXPECT_EQ(n.triples()[0], (PreferenceTriple{1, 2, 0}));
  EXPECT_EQ(n.triples()[1], (PreferenceTriple{0, 4, 3}));

  WriteFile(dir_ / "bad.jsonl", "{\"prompt\": \"zz\", \"chosen\": 0, \"rejected\": 1}\n");
  EXPECT_THROW(LoadDataset(dir_ / "bad.jsonl", sw.world, "x"), LookupError);
  WriteFile(dir_ / "broken.jsonl", "{not json\n");
  EXPECT_THROW(LoadDataset(dir_ / "broken.jsonl", sw.world, "x"), InvalidInputError);
}

TEST_F(IoTest, MissingFileIsIoError) {
  EXPECT_THROW(ReadFile(dir_ / "nope.json"), IoError);
}

TEST_F(IoTest, ShapleyResultRoundTrip) {
  ShapleyResult r;
  r.estimator = Estimator::kMcPermutation;
  r.values = Grid::FromRows({{0.25, -1.5}, {1e-17, 3.0}});
  r.standard_error = Grid::FromRows({{0.1, NAN}, {0.2, 0.3}});
  r.seed = 42;
  r.num_permutations = 10;
  r.coalitions_evaluated = 4;
  r.empty_utility = {0.0, 1.0};
  r.full_utility = {2.0, 3.0};
  r.players = {"a", "b"};
  r.reward_names = {"u", "v"};
  const ShapleyResult back = ShapleyResultFromJson(ShapleyResultToJson(r));
  EXPECT_EQ(back.values, r.values);
  EXPECT_EQ(back.estimator, r.estimator);
  EXPECT_EQ(back.players, r.players);
  EXPECT_EQ(back.reward_names, r.reward_names);
  EXPECT_EQ(back.seed, 42u);
  ASSERT_TRUE(back.standard_error.has_value());
  EXPECT_TRUE(std::isnan((*back.standard_error)(0, 1)));
  EXPECT_EQ((*back.standard_error)(1, 1), 0.3);
}

TEST_F(IoTest, CacheRoundTripChecksFingerprint) {
  UtilityCache cache;
  cache.Insert("[a]", {1.0, 2.0});
  cache.Insert("[]", {0.0, 0.5});
  const auto j = UtilityCacheToJson(cache, "abc");
  UtilityCache loaded;
  EXPECT_TRUE(UtilityCacheFromJson(j, "abc", loaded));
  EXPECT_EQ(loaded.Entries(), cache.Entries());
  EXPECT_EQ(loaded.oracle_calls(), 0u);
  UtilityCache other;
  EXPECT_FALSE(UtilityCacheFromJson(j, "xyz", other));
  EXPECT_EQ(other.size(), 0u);
}

TEST_F(IoTest, ManifestRoundTrip) {
  cli::RunManifest m;
  m.world = "world.json";
  m.reference = "reference.json";
  m.sources.push_back({"s0", "data/s0.jsonl", fs::path("truth/s0.json"), 17});
  m.sources.push_back({"s1", "data/s1.jsonl", std::nullopt, std::nullopt});
  m.eval_rewards.push_back({"eval0", "eval/eval0.json"});
  m.alignment.beta = 0.25;
  m.alignment.method = OptimizerMethod::kGradientAscent;
  m.estimator.kind = Estimator::kRegression;
  m.estimator.samples = 40;
  m.estimator.eval_samples = 64;
  m.seed = 9;
  m.generator = WorldSpec{};
  m.base_dir = dir_;
  cli::SaveManifest(m, dir_ / "manifest.json");
  EXPECT_EQ(cli::LoadManifest(dir_ / "manifest.json"), m);
  EXPECT_THROW(m.Validate(), IoError);

  m.estimator.samples.reset();
  m.generator.reset();
  EXPECT_EQ(cli::ManifestFromJson(cli::ManifestToJson(m), dir_), m);
}

TEST_F(IoTest, ManifestRejectsBadIds) {
  cli::RunManifest m;
  m.world = "w.json";
  m.reference = "r.json";
  m.sources.push_back({"a,b", "d.jsonl", std::nullopt, std::nullopt});
  m.base_dir = dir_;
  WriteFile(dir_ / "w.json", "{}");
  WriteFile(dir_ / "r.json", "{}");
  WriteFile(dir_ / "d.jsonl", "");
  EXPECT_THROW(m.Validate(), InvalidInputError);
}

}  // namespace
}  // namespace prefshap
