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

#ifndef PREFSHAP_VALUATION_H_
#define PREFSHAP_VALUATION_H_

#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "prefshap/arithmetic.h"
#include "prefshap/grid.h"
#include "prefshap/policy.h"
#include "prefshap/reward.h"

namespace prefshap {

// ---------------------------------------------------------------------------
// Policy value and coalition utility.
// ---------------------------------------------------------------------------

// Closed-form expectation over the evaluation distribution and the policy.
struct ExactValue {};

// Monte Carlo estimate: `num_prompts` prompts drawn from the evaluation
// distribution, one sampled response each, rewards averaged.
struct SampledValue {
  int num_prompts = 128;
  std::uint64_t seed = 0;
};

using ValueMode = std::variant<ExactValue, SampledValue>;

// Expected reward of `policy` under the world's evaluation distribution.
// Deterministic given the seed in sampled mode.
double PolicyValue(const Policy& policy, const RewardTable& reward,
                   const ValueMode& mode = ExactValue{});

// Memoizes coalition utilities by canonical coalition key. Safe for
// concurrent use: each key is computed at most once, and concurrent requests
// for a key that is being computed wait for that computation.
class UtilityCache {
 public:
  using Values = std::vector<double>;

  // Returns the cached vector for `key`, or runs `compute` (counted as one
  // oracle call) and stores its result. If `compute` throws, nothing is
  // cached and the exception reaches every waiter.
  Values GetOrCompute(const std::string& key,
                      const std::function<Values()>& compute);

  // Seeds the cache from persisted values; not counted as oracle calls.
  void Insert(const std::string& key, Values values);

  std::optional<Values> Find(const std::string& key) const;
  std::size_t size() const;
  std::size_t oracle_calls() const;

  // Completed entries in key order.
  std::map<std::string, Values> Entries() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::shared_future<Values>> entries_;
  std::size_t oracle_calls_ = 0;
};

// (v_k(pi_S))_k for every evaluation reward k, with pi_S taken from
// CoalitionModel and memoized in `cache` under coalition.Key().
std::vector<double> CoalitionUtility(UtilityCache& cache,
                                     const CoalitionModelProvider& provider,
                                     const Coalition& coalition,
                                     const std::vector<RewardTable>& rewards,
                                     const ValueMode& mode = ExactValue{});

// ---------------------------------------------------------------------------
// Shapley estimators over an abstract utility oracle.
// ---------------------------------------------------------------------------

// Subset of players {0, ..., n-1} as a bit mask (n <= 62).
class PlayerSet {
 public:
  constexpr PlayerSet() = default;
  constexpr explicit PlayerSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr PlayerSet Full(int n) {
    return PlayerSet((std::uint64_t{1} << n) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool Contains(int i) const { return (bits_ >> i) & 1u; }
  constexpr PlayerSet With(int i) const {
    return PlayerSet(bits_ | (std::uint64_t{1} << i));
  }
  int size() const;
  std::vector<int> Members() const;
  // e.g. "{0,2}".
  std::string ToString() const;

  friend constexpr bool operator==(PlayerSet, PlayerSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

// Utility of a coalition, one entry per reward dimension. Must be safe to call
// from several threads when an estimator runs with jobs > 1.
using UtilityFn = std::function<std::vector<double>(PlayerSet)>;

// Wraps `fn` so results are memoized in `cache`, keyed by the coalition of
// player names (player i is names[i]).
UtilityFn CachedUtility(UtilityCache& cache, std::vector<std::string> names,
                        UtilityFn fn);

// The utility oracle of a provider: player i is provider.source_ids()[i].
UtilityFn ProviderUtility(UtilityCache& cache,
                          const CoalitionModelProvider& provider,
                          const std::vector<RewardTable>& rewards,
                          const ValueMode& mode = ExactValue{});

enum class Estimator {
  kExact,
  kMcPermutation,
  kRegression,
};

std::string ToString(Estimator estimator);
Estimator ParseEstimator(const std::string& name);

struct ShapleyResult {
  Estimator estimator = Estimator::kExact;
  // players x reward dimensions.
  Grid values;
  // Per-entry standard error; present only for kMcPermutation.
  std::optional<Grid> standard_error;
  std::uint64_t seed = 0;
  int num_permutations = 0;  // kMcPermutation
  int num_samples = 0;       // kRegression; 0 means all coalitions
  std::size_t coalitions_evaluated = 0;
  std::vector<double> empty_utility;  // u(empty set)
  std::vector<double> full_utility;   // u(all players)
  // Optional labels, filled by callers that know them.
  std::vector<std::string> players;
  std::vector<std::string> reward_names;
};

// Weighted sum over all 2^n coalitions with weights |S|!(n-|S|-1)!/n!.
// Requires 1 <= n <= 24.
ShapleyResult ExactShapley(int n, const UtilityFn& utility, int jobs = 1);

struct McOptions {
  int num_permutations = 1000;
  std::uint64_t seed = 0;
  // Cycle through all n! permutations in lexicographic order instead of
  // sampling (n <= 10). With num_permutations = n! the estimate is exact.
  bool stratified = false;
  int jobs = 1;
};

// Average marginal contribution along permutations, with the standard error of
// that average per entry (NaN for a single permutation).
ShapleyResult McPermutationShapley(int n, const UtilityFn& utility,
                                   const McOptions& options);

struct RegressionOptions {
  // nullopt: all 2^n coalitions. Otherwise that many coalitions are sampled
  // with probability proportional to the Shapley kernel.
  std::optional<int> num_samples;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Kernel-weighted least squares fit of u(S) ~ phi_0 + sum_{i in S} phi_i with
// u(empty) and u(all) imposed exactly. Throws RankDeficiencyError when the
// sampled coalitions do not identify every phi_i.
ShapleyResult RegressionShapley(int n, const UtilityFn& utility,
                                const RegressionOptions& options);

// ---------------------------------------------------------------------------
// Spatial signature: each source's coordinates in multi-reward value space.
// ---------------------------------------------------------------------------

struct SignatureRow {
  std::string source;
  std::vector<double> coords;
  // max(coords) - min(coords); zero exactly when the point lies on the
  // agreement diagonal y = x (= z ...).
  double diagonal_gap = 0.0;
};

struct SpatialSignature {
  std::vector<std::string> reward_names;
  std::vector<SignatureRow> rows;
};

// Throws InvalidInputError when the names do not match the result's shape.
SpatialSignature MakeSpatialSignature(
    const ShapleyResult& result, const std::vector<std::string>& source_ids,
    const std::vector<std::string>& reward_names);

// Header "source,<reward1>,...", one row per source, shortest round-trip
// decimal formatting.
std::string SignatureToCsv(const SpatialSignature& signature);

}  // namespace prefshap

#endif  // PREFSHAP_VALUATION_H_
