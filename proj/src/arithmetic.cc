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

#include "prefshap/arithmetic.h"

#include <algorithm>
#include <cmath>

#include "prefshap/alignment.h"
#include "prefshap/errors.h"

namespace prefshap {

Coalition Coalition::FromIds(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  auto dup = std::adjacent_find(ids.begin(), ids.end());
  if (dup != ids.end()) {
    throw InvalidInputError("coalition lists source '" + *dup + "' twice");
  }
  Coalition c;
  c.ids_ = std::move(ids);
  return c;
}

bool Coalition::Contains(const std::string& id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::string Coalition::Key() const {
  std::string key = "[";
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (i > 0) key += ',';
    key += ids_[i];
  }
  key += ']';
  return key;
}

void ValidateSourceId(const std::string& id) {
  if (id.empty() || id.find_first_of(",[]") != std::string::npos) {
    throw InvalidInputError("invalid source id '" + id +
                            "': must be non-empty without ',', '[' or ']'");
  }
}

std::string ToString(CoalitionMode mode) {
  return mode == CoalitionMode::kComposed ? "composed" : "exact_oracle";
}

CoalitionModelProvider::CoalitionModelProvider(Policy reference,
                                               CoalitionMode mode)
    : reference_(std::move(reference)), mode_(mode) {
  // (1 - |S|) * log pi_ref must stay finite, otherwise a -inf reference entry
  // turns into +inf for |S| >= 2.
  if (!reference_.HasFullSupport()) {
    throw DomainError("coalition composition needs a reference policy with "
                      "full support");
  }
}

CoalitionModelProvider CoalitionModelProvider::Composed(
    Policy reference, std::map<std::string, Policy> per_source_policies) {
  CoalitionModelProvider provider(std::move(reference),
                                  CoalitionMode::kComposed);
  for (const auto& [id, policy] : per_source_policies) {
    ValidateSourceId(id);
    if (!SameWorld(policy.world_ptr(), provider.reference_.world_ptr())) {
      throw InvalidInputError("policy for source '" + id +
                              "' belongs to a different world");
    }
    provider.source_ids_.push_back(id);
  }
  provider.policies_ = std::move(per_source_policies);
  return provider;
}

CoalitionModelProvider CoalitionModelProvider::ExactOracle(
    Policy reference, std::map<std::string, RewardTable> per_source_rewards,
    double beta, std::map<std::string, Policy> per_source_policies) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidInputError("beta must be finite and > 0");
  }
  CoalitionModelProvider provider(std::move(reference),
                                  CoalitionMode::kExactOracle);
  provider.beta_ = beta;
  for (const auto& [id, reward] : per_source_rewards) {
    ValidateSourceId(id);
    if (!SameWorld(reward.world_ptr(), provider.reference_.world_ptr())) {
      throw InvalidInputError("reward for source '" + id +
                              "' belongs to a different world");
    }
    provider.source_ids_.push_back(id);
  }
  if (!per_source_policies.empty()) {
    if (per_source_policies.size() != per_source_rewards.size()) {
      throw InvalidInputError("per-source policies and rewards disagree");
    }
    for (const auto& [id, policy] : per_source_policies) {
      if (!per_source_rewards.contains(id)) {
        throw InvalidInputError("policy for source '" + id +
                                "' has no matching reward");
      }
      if (!SameWorld(policy.world_ptr(), provider.reference_.world_ptr())) {
        throw InvalidInputError("policy for source '" + id +
                                "' belongs to a different world");
      }
    }
  }
  provider.rewards_ = std::move(per_source_rewards);
  provider.policies_ = std::move(per_source_policies);
  return provider;
}

const Policy& CoalitionModelProvider::policy(const std::string& id) const {
  auto it = policies_.find(id);
  if (it == policies_.end()) {
    throw LookupError("no policy for source '" + id + "'");
  }
  return it->second;
}

const RewardTable& CoalitionModelProvider::reward(const std::string& id) const {
  auto it = rewards_.find(id);
  if (it == rewards_.end()) {
    throw LookupError("no reward for source '" + id + "'");
  }
  return it->second;
}

Grid CoalitionScores(const CoalitionModelProvider& provider,
                     const Coalition& coalition) {
  const Grid& ref = provider.reference().log_probs();
  Grid scores(ref.rows(), ref.cols(), 0.0);
  auto fs = scores.Flat();
  for (const std::string& id : coalition.ids()) {
    const auto fl = provider.policy(id).log_probs().Flat();
    for (std::size_t i = 0; i < fs.size(); ++i) fs[i] += fl[i];
  }
  const double ref_weight = 1.0 - static_cast<double>(coalition.size());
  const auto fr = ref.Flat();
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] += ref_weight * fr[i];
  return scores;
}

Policy ComposeCoalition(const CoalitionModelProvider& provider,
                        const Coalition& coalition) {
  if (coalition.empty()) return provider.reference();
  return Policy::FromScores(provider.reference().world_ptr(),
                            CoalitionScores(provider, coalition));
}

Policy CoalitionModel(const CoalitionModelProvider& provider,
                      const Coalition& coalition) {
  if (provider.mode() == CoalitionMode::kComposed) {
    return ComposeCoalition(provider, coalition);
  }
  std::vector<RewardTable> rewards;
  for (const std::string& id : coalition.ids()) {
    rewards.push_back(provider.reward(id));
  }
  return ExactCoalitionPolicy(provider.reference(), rewards, provider.beta());
}

}  // namespace prefshap
