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

#ifndef PREFSHAP_REWARD_H_
#define PREFSHAP_REWARD_H_

#include <cstddef>
#include <string>
#include <vector>

#include "prefshap/grid.h"
#include "prefshap/optimize.h"
#include "prefshap/policy.h"
#include "prefshap/world.h"

namespace prefshap {

enum class Gauge {
  kZeroMeanPerPrompt,
  kRaw,
};

std::string ToString(Gauge gauge);
Gauge ParseGauge(const std::string& name);

// Scalar reward on the full (prompt, response) grid. Rewards are identified
// only up to a per-prompt constant; kZeroMeanPerPrompt is the canonical
// representative used for equality checks.
class RewardTable {
 public:
  // Throws InvalidInputError for non-finite entries, a shape mismatch, or a
  // kZeroMeanPerPrompt table whose row means exceed 1e-9.
  RewardTable(WorldPtr world, Grid values, Gauge gauge = Gauge::kRaw);

  static RewardTable Zero(WorldPtr world);

  const World& world() const { return *world_; }
  const WorldPtr& world_ptr() const { return world_; }
  const Grid& values() const { return values_; }
  Gauge gauge() const { return gauge_; }
  double operator()(std::size_t x, std::size_t y) const { return values_(x, y); }

  // Subtracts each prompt's mean.
  RewardTable GaugeFixed() const;

 private:
  WorldPtr world_;
  Grid values_;
  Gauge gauge_;
};

struct PreferenceTriple {
  std::size_t prompt;
  std::size_t chosen;
  std::size_t rejected;

  friend bool operator==(const PreferenceTriple&,
                         const PreferenceTriple&) = default;
};

// Pairwise preferences contributed by one data source. May be empty.
class PreferenceDataset {
 public:
  // Throws LookupError for out-of-range indices and InvalidInputError when
  // chosen == rejected.
  PreferenceDataset(WorldPtr world, std::string source_id,
                    std::vector<PreferenceTriple> triples);

  // Same, from string identifiers.
  struct NamedTriple {
    std::string prompt;
    std::string chosen;
    std::string rejected;
  };
  static PreferenceDataset FromNames(WorldPtr world, std::string source_id,
                                     const std::vector<NamedTriple>& triples);

  const World& world() const { return *world_; }
  const WorldPtr& world_ptr() const { return world_; }
  const std::string& source_id() const { return source_id_; }
  const std::vector<PreferenceTriple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

 private:
  WorldPtr world_;
  std::string source_id_;
  std::vector<PreferenceTriple> triples_;
};

// Identical triples merged into one entry with a multiplicity. Sorted by
// (prompt, chosen, rejected) so every consumer iterates in the same order.
struct WeightedPair {
  std::size_t prompt;
  std::size_t chosen;
  std::size_t rejected;
  double count;
};
std::vector<WeightedPair> AggregatePairs(const PreferenceDataset& data);

// sum_i log sigmoid(r(x_i, y+_i) - r(x_i, y-_i)).
double BtLogLikelihood(const RewardTable& reward, const PreferenceDataset& data);

// sigmoid(r(x, y+) - r(x, y-)). The two orderings sum to exactly 1.
double PrefProb(const RewardTable& reward, std::size_t x, std::size_t y_plus,
                std::size_t y_minus);
double PrefProb(const RewardTable& reward, const std::string& x,
                const std::string& y_plus, const std::string& y_minus);

inline constexpr double kDefaultL2 = 1e-3;

// Maximizes BtLogLikelihood(r, data) - (l2 / 2) * ||r||^2 over the full grid
// and returns the maximizer in the zero-mean gauge. Pairs never observed stay
// at 0. Throws InvalidInputError for empty data or l2 < 0, and
// ConvergenceError when the gradient norm does not reach opts.tol.
RewardTable FitBtReward(const PreferenceDataset& data, double l2 = kDefaultL2,
                        const OptimizerSettings& opts = {});

// beta * (log pi - log pi_ref), gauge-fixed. DomainError where pi has mass
// the reference lacks.
RewardTable ImplicitReward(const Policy& policy, const Policy& reference,
                           double beta);

}  // namespace prefshap

#endif  // PREFSHAP_REWARD_H_
