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

#include "prefshap/synthgen.h"

#include <algorithm>
#include <random>

#include "prefshap/errors.h"
#include "prefshap/random.h"

namespace prefshap {
namespace {

constexpr std::uint64_t kEvalDistStream = 0;
constexpr std::uint64_t kReferenceStream = 1;
constexpr std::uint64_t kTruthStreamBase = 1000;
constexpr std::uint64_t kEvalRewardStreamBase = 2000;

RewardTable RandomReward(const WorldPtr& world, double scale, Rng rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Grid values(world->num_prompts(), world->num_responses());
  for (double& v : values.Flat()) v = normal(rng);
  return RewardTable(world, std::move(values), Gauge::kRaw).GaugeFixed();
}

std::vector<std::string> Names(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

void WorldSpec::Validate() const {
  if (num_prompts < 1 || num_responses < 1 || num_sources < 1 ||
      pairs_per_source < 1 || num_eval_rewards < 1) {
    throw InvalidInputError("world spec counts must all be >= 1");
  }
  if (!(reward_scale > 0.0)) {
    throw InvalidInputError("reward_scale must be > 0");
  }
}

std::vector<std::string> SourceIds(int num_sources) {
  const int width = static_cast<int>(std::to_string(std::max(0, num_sources - 1)).size());
  std::vector<std::string> ids;
  for (int i = 0; i < num_sources; ++i) {
    std::string digits = std::to_string(i);
    ids.push_back("s" + std::string(width - digits.size(), '0') + digits);
  }
  return ids;
}

SyntheticWorld MakeRandomWorld(const WorldSpec& spec) {
  spec.Validate();

  Rng dist_rng = MakeRng(spec.seed, kEvalDistStream);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> eval_dist(spec.num_prompts);
  double total = 0.0;
  for (double& p : eval_dist) total += (p = gamma(dist_rng) + 1e-3);
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < eval_dist.size(); ++i) {
    eval_dist[i] /= total;
    head += eval_dist[i];
  }
  eval_dist.back() = 1.0 - head;

  auto world = std::make_shared<const World>(
      Names("p", spec.num_prompts), Names("r", spec.num_responses),
      std::move(eval_dist));

  Rng ref_rng = MakeRng(spec.seed, kReferenceStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Grid logits(world->num_prompts(), world->num_responses());
  for (double& v : logits.Flat()) v = normal(ref_rng);

  SyntheticWorld out{world, SoftmaxPolicyFromLogits(world, logits), {}, {}, {},
                     {}};
  out.source_ids = SourceIds(spec.num_sources);
  for (int i = 0; i < spec.num_sources; ++i) {
    out.truth_rewards.push_back(RandomReward(
        world, spec.reward_scale, MakeRng(spec.seed, kTruthStreamBase + i)));
  }
  out.eval_names = Names("eval", spec.num_eval_rewards);
  for (int k = 0; k < spec.num_eval_rewards; ++k) {
    out.eval_rewards.push_back(
        RandomReward(world, spec.reward_scale,
                     MakeRng(spec.seed, kEvalRewardStreamBase + k)));
  }
  return out;
}

PreferenceDataset GeneratePreferences(const RewardTable& truth, int num_pairs,
                                      std::uint64_t seed,
                                      std::string source_id) {
  const World& world = truth.world();
  if (world.num_responses() < 2) {
    throw InvalidInputError("preference data needs at least two responses");
  }
  if (num_pairs < 1) throw InvalidInputError("num_pairs must be >= 1");

  Rng rng = MakeRng(seed);
  std::discrete_distribution<std::size_t> prompts(world.eval_dist().begin(),
                                                  world.eval_dist().end());
  const std::size_t n = world.num_responses();
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::uniform_int_distribution<std::size_t> second(0, n - 2);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<PreferenceTriple> triples;
  triples.reserve(num_pairs);
  for (int i = 0; i < num_pairs; ++i) {
    const std::size_t x = prompts(rng);
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;  // uniform over responses other than a
    if (coin(rng) < PrefProb(truth, x, a, b)) {
      triples.push_back({x, a, b});
    } else {
      triples.push_back({x, b, a});
    }
  }
  return PreferenceDataset(truth.world_ptr(), std::move(source_id),
                           std::move(triples));
}

}  // namespace prefshap
