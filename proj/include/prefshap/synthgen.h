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

#ifndef PREFSHAP_SYNTHGEN_H_
#define PREFSHAP_SYNTHGEN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "prefshap/policy.h"
#include "prefshap/reward.h"
#include "prefshap/world.h"

namespace prefshap {

struct WorldSpec {
  int num_prompts = 8;
  int num_responses = 5;
  int num_sources = 4;
  double reward_scale = 1.0;
  int pairs_per_source = 2000;
  int num_eval_rewards = 2;
  std::uint64_t seed = 0;

  // Throws InvalidInputError unless every count is >= 1 and
  // reward_scale > 0.
  void Validate() const;

  friend bool operator==(const WorldSpec&, const WorldSpec&) = default;
};

struct SyntheticWorld {
  WorldPtr world;
  Policy reference;
  std::vector<std::string> source_ids;     // sorted
  std::vector<RewardTable> truth_rewards;  // one per source
  std::vector<std::string> eval_names;
  std::vector<RewardTable> eval_rewards;
};

// Random world: prompts "p<i>", responses "r<j>", a random evaluation
// distribution, a random full-support reference and i.i.d. Gaussian rewards of
// standard deviation reward_scale, gauge-fixed. Deterministic given the seed.
SyntheticWorld MakeRandomWorld(const WorldSpec& spec);

// Bradley-Terry preference data: each triple draws a prompt from the
// evaluation distribution and two distinct responses uniformly, and the first
// wins with probability sigmoid(r(x, y1) - r(x, y2)). Throws
// InvalidInputError when the world has fewer than two responses or
// num_pairs < 1.
PreferenceDataset GeneratePreferences(const RewardTable& truth, int num_pairs,
                                      std::uint64_t seed,
                                      std::string source_id = "");

// Zero-padded source names s0..s<n-1>, sortable as strings.
std::vector<std::string> SourceIds(int num_sources);

}  // namespace prefshap

#endif  // PREFSHAP_SYNTHGEN_H_
