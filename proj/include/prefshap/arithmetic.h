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

#ifndef PREFSHAP_ARITHMETIC_H_
#define PREFSHAP_ARITHMETIC_H_

#include <map>
#include <string>
#include <vector>

#include "prefshap/grid.h"
#include "prefshap/policy.h"
#include "prefshap/reward.h"

namespace prefshap {

// A set of data-source identifiers, kept sorted. Sets, not multisets:
// duplicates are rejected at construction.
class Coalition {
 public:
  Coalition() = default;

  // Throws InvalidInputError on a repeated identifier.
  static Coalition FromIds(std::vector<std::string> ids);

  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool Contains(const std::string& id) const;

  // Canonical string form, e.g. "[]" or "[s0,s2]".
  std::string Key() const;

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  std::vector<std::string> ids_;
};

// Source identifiers must be non-empty and free of ',', '[' and ']' so that
// coalition keys are unambiguous. Throws InvalidInputError otherwise.
void ValidateSourceId(const std::string& id);

enum class CoalitionMode {
  // Training-free: combine individually aligned policies with the reference.
  kComposed,
  // Closed form over the per-source rewards; the baseline that measures how
  // far composed coalitions drift when per-source policies are finite-sample
  // fits.
  kExactOracle,
};

std::string ToString(CoalitionMode mode);

class CoalitionModelProvider {
 public:
  // Composed mode. Every policy must share the reference's world, and the
  // reference must have full support (DomainError otherwise).
  static CoalitionModelProvider Composed(
      Policy reference, std::map<std::string, Policy> per_source_policies);

  // Exact-oracle mode over per-source rewards. `per_source_policies` may be
  // empty; when given, its keys must match the reward keys.
  static CoalitionModelProvider ExactOracle(
      Policy reference, std::map<std::string, RewardTable> per_source_rewards,
      double beta, std::map<std::string, Policy> per_source_policies = {});

  CoalitionMode mode() const { return mode_; }
  const Policy& reference() const { return reference_; }
  double beta() const { return beta_; }

  // Sorted.
  const std::vector<std::string>& source_ids() const { return source_ids_; }

  // Throws LookupError for unknown ids or, in exact-oracle mode without
  // policies, when no policy is stored.
  const Policy& policy(const std::string& id) const;
  const RewardTable& reward(const std::string& id) const;

 private:
  CoalitionModelProvider(Policy reference, CoalitionMode mode);

  Policy reference_;
  CoalitionMode mode_;
  double beta_ = 0.0;
  std::map<std::string, Policy> policies_;
  std::map<std::string, RewardTable> rewards_;
  std::vector<std::string> source_ids_;
};

// Unnormalized coalition score
//   sum_{l in S} log pi_l(y|x) + (1 - |S|) log pi_ref(y|x),
// summed in sorted-id order. Throws LookupError for unknown members.
Grid CoalitionScores(const CoalitionModelProvider& provider,
                     const Coalition& coalition);

// Softmax of CoalitionScores. The empty coalition gives the reference and a
// singleton gives that source's policy. Throws DegenerateSupportError when a
// prompt ends up with no response of positive probability.
Policy ComposeCoalition(const CoalitionModelProvider& provider,
                        const Coalition& coalition);

// Dispatches on the provider mode: ComposeCoalition or ExactCoalitionPolicy.
Policy CoalitionModel(const CoalitionModelProvider& provider,
                      const Coalition& coalition);

}  // namespace prefshap

#endif  // PREFSHAP_ARITHMETIC_H_
