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

#include <algorithm>
#include <cmath>
#include <limits>

#include "prefshap/errors.h"

namespace prefshap {
namespace {

constexpr double kNormTolerance = 1e-9;

void CheckShape(const World& world, const Grid& grid, const char* what) {
  if (grid.rows() != world.num_prompts() ||
      grid.cols() != world.num_responses()) {
    throw InvalidInputError(std::string(what) + " is " +
                            std::to_string(grid.rows()) + "x" +
                            std::to_string(grid.cols()) + ", world is " +
                            std::to_string(world.num_prompts()) + "x" +
                            std::to_string(world.num_responses()));
  }
}

void CheckSameWorld(const Policy& p, const Policy& q) {
  if (!SameWorld(p.world_ptr(), q.world_ptr())) {
    throw InvalidInputError("policies belong to different worlds");
  }
}

}  // namespace

Policy::Policy(WorldPtr world, Grid log_probs)
    : world_(std::move(world)), log_probs_(std::move(log_probs)) {
  if (!world_) throw InvalidInputError("policy needs a world");
  CheckShape(*world_, log_probs_, "log-probability table");
  for (std::size_t x = 0; x < log_probs_.rows(); ++x) {
    for (double v : log_probs_.Row(x)) {
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw InvalidInputError("log-probabilities must not be NaN or +inf");
      }
    }
    const double lse = LogSumExp(log_probs_.Row(x));
    if (!(std::abs(lse) <= kNormTolerance)) {
      throw InvalidInputError("row for prompt '" + world_->prompts()[x] +
                              "' is not normalized (log-sum-exp " +
                              std::to_string(lse) + ")");
    }
  }
}

Policy Policy::FromScores(WorldPtr world, Grid scores) {
  if (!world) throw InvalidInputError("policy needs a world");
  CheckShape(*world, scores, "score table");
  for (std::size_t x = 0; x < scores.rows(); ++x) {
    auto row = scores.Row(x);
    for (double v : row) {
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw InvalidInputError("scores must not be NaN or +inf");
      }
    }
    const double lse = LogSumExp(row);
    if (std::isinf(lse)) {
      throw DegenerateSupportError("every response of prompt '" +
                                   world->prompts()[x] +
                                   "' has zero probability");
    }
    for (double& v : row) v -= lse;
  }
  return Policy(std::move(world), std::move(scores));
}

double Policy::Prob(std::size_t x, std::size_t y) const {
  return std::exp(log_probs_(x, y));
}

bool Policy::HasFullSupport() const {
  const auto flat = log_probs_.Flat();
  return std::all_of(flat.begin(), flat.end(),
                     [](double v) { return std::isfinite(v); });
}

Policy UniformPolicy(WorldPtr world) {
  const std::size_t rows = world->num_prompts();
  const std::size_t cols = world->num_responses();
  return Policy::FromScores(std::move(world), Grid(rows, cols, 0.0));
}

Policy SoftmaxPolicyFromLogits(WorldPtr world, const Grid& logits) {
  for (double v : logits.Flat()) {
    if (!std::isfinite(v)) {
      throw InvalidInputError("logits must be finite");
    }
  }
  return Policy::FromScores(std::move(world), logits);
}

double LogProb(const Policy& policy, const std::string& prompt,
               const std::string& response) {
  return policy.LogProb(policy.world().PromptIndex(prompt),
                        policy.world().ResponseIndex(response));
}

double KlDivergence(const Policy& p, const Policy& q, std::size_t x) {
  CheckSameWorld(p, q);
  if (x >= p.world().num_prompts()) {
    throw LookupError("prompt index out of range");
  }
  double kl = 0.0;
  for (std::size_t y = 0; y < p.world().num_responses(); ++y) {
    const double lp = p.LogProb(x, y);
    if (std::isinf(lp)) continue;  // zero mass contributes nothing
    const double lq = q.LogProb(x, y);
    if (std::isinf(lq)) {
      throw DomainError("KL undefined: q has zero probability on response '" +
                        p.world().responses()[y] + "' where p does not");
    }
    kl += std::exp(lp) * (lp - lq);
  }
  // Rounding can leave a tiny negative value for p == q.
  return std::max(kl, 0.0);
}

double KlDivergence(const Policy& p, const Policy& q, const std::string& x) {
  return KlDivergence(p, q, p.world().PromptIndex(x));
}

double TotalVariation(const Policy& p, const Policy& q, std::size_t x) {
  CheckSameWorld(p, q);
  double l1 = 0.0;
  for (std::size_t y = 0; y < p.world().num_responses(); ++y) {
    l1 += std::abs(p.Prob(x, y) - q.Prob(x, y));
  }
  return 0.5 * l1;
}

double MaxTotalVariation(const Policy& p, const Policy& q) {
  double worst = 0.0;
  for (std::size_t x = 0; x < p.world().num_prompts(); ++x) {
    worst = std::max(worst, TotalVariation(p, q, x));
  }
  return worst;
}

std::size_t SampleResponse(const Policy& policy, std::size_t x, Rng& rng) {
  if (x >= policy.world().num_prompts()) {
    throw LookupError("prompt index out of range");
  }
  const std::size_t n = policy.world().num_responses();
  std::vector<double> weights(n);
  for (std::size_t y = 0; y < n; ++y) weights[y] = policy.Prob(x, y);
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  return dist(rng);
}

std::string SampleResponse(const Policy& policy, const std::string& x,
                           Rng& rng) {
  const std::size_t y =
      SampleResponse(policy, policy.world().PromptIndex(x), rng);
  return policy.world().responses()[y];
}

}  // namespace prefshap
