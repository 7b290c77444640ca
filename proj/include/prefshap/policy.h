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

#ifndef PREFSHAP_POLICY_H_
#define PREFSHAP_POLICY_H_

#include <cstddef>
#include <string>

#include "prefshap/grid.h"
#include "prefshap/random.h"
#include "prefshap/world.h"

namespace prefshap {

// Tabular stochastic policy: one normalized log-probability row per prompt.
// Zero probabilities are stored as -inf. Immutable.
class Policy {
 public:
  // Takes already-normalized log-probabilities. Throws InvalidInputError on a
  // shape mismatch, NaN or +inf entries, or when a row's log-sum-exp is not
  // 0 within 1e-9.
  Policy(WorldPtr world, Grid log_probs);

  // Normalizes arbitrary scores row by row (log-softmax). -inf scores are
  // allowed and stay at zero probability; a row that is entirely -inf raises
  // DegenerateSupportError.
  static Policy FromScores(WorldPtr world, Grid scores);

  const World& world() const { return *world_; }
  const WorldPtr& world_ptr() const { return world_; }
  const Grid& log_probs() const { return log_probs_; }

  double LogProb(std::size_t x, std::size_t y) const {
    return log_probs_(x, y);
  }
  double Prob(std::size_t x, std::size_t y) const;

  // True when no entry is -inf.
  bool HasFullSupport() const;

 private:
  WorldPtr world_;
  Grid log_probs_;
};

Policy UniformPolicy(WorldPtr world);

// Softmax of finite logits, row by row. Adding a per-prompt constant to the
// logits leaves the result unchanged. Non-finite logits raise
// InvalidInputError.
Policy SoftmaxPolicyFromLogits(WorldPtr world, const Grid& logits);

double LogProb(const Policy& policy, const std::string& prompt,
               const std::string& response);

// KL(p(.|x) || q(.|x)). Raises DomainError when q(y|x) = 0 < p(y|x).
double KlDivergence(const Policy& p, const Policy& q, std::size_t x);
double KlDivergence(const Policy& p, const Policy& q, const std::string& x);

// Half the L1 distance between the two conditionals at prompt x.
double TotalVariation(const Policy& p, const Policy& q, std::size_t x);
// Worst prompt.
double MaxTotalVariation(const Policy& p, const Policy& q);

std::size_t SampleResponse(const Policy& policy, std::size_t x, Rng& rng);
std::string SampleResponse(const Policy& policy, const std::string& x,
                           Rng& rng);

}  // namespace prefshap

#endif  // PREFSHAP_POLICY_H_
