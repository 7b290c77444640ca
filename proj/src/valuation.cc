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
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <Eigen/Dense>

#include "prefshap/errors.h"
#include "prefshap/parallel.h"
#include "prefshap/random.h"

namespace prefshap {

double PolicyValue(const Policy& policy, const RewardTable& reward,
                   const ValueMode& mode) {
  if (!SameWorld(policy.world_ptr(), reward.world_ptr())) {
    throw InvalidInputError("policy and reward belong to different worlds");
  }
  const World& world = policy.world();
  if (std::holds_alternative<ExactValue>(mode)) {
    double value = 0.0;
    for (std::size_t x = 0; x < world.num_prompts(); ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < world.num_responses(); ++y) {
        row += policy.Prob(x, y) * reward(x, y);
      }
      value += world.eval_dist()[x] * row;
    }
    return value;
  }
  const auto& sampled = std::get<SampledValue>(mode);
  if (sampled.num_prompts < 1) {
    throw InvalidInputError("sampled policy value needs at least one prompt");
  }
  Rng rng = MakeRng(sampled.seed);
  std::discrete_distribution<std::size_t> prompts(world.eval_dist().begin(),
                                                  world.eval_dist().end());
  double total = 0.0;
  for (int j = 0; j < sampled.num_prompts; ++j) {
    const std::size_t x = prompts(rng);
    total += reward(x, SampleResponse(policy, x, rng));
  }
  return total / sampled.num_prompts;
}

UtilityCache::Values UtilityCache::GetOrCompute(
    const std::string& key, const std::function<Values()>& compute) {
  std::promise<Values> promise;
  std::shared_future<Values> future;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      entries_.emplace(key, future);
      ++oracle_calls_;
      owner = true;
    }
  }
  if (!owner) return future.get();
  try {
    Values values = compute();
    promise.set_value(values);
    return values;
  } catch (...) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      entries_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

void UtilityCache::Insert(const std::string& key, Values values) {
  std::promise<Values> promise;
  promise.set_value(std::move(values));
  std::lock_guard<std::mutex> lock(mu_);
  entries_.insert_or_assign(key, promise.get_future().share());
}

namespace {

bool IsReady(const std::shared_future<UtilityCache::Values>& f) {
  return f.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
}

}  // namespace

std::optional<UtilityCache::Values> UtilityCache::Find(
    const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end() || !IsReady(it->second)) return std::nullopt;
  return it->second.get();
}

std::size_t UtilityCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::size_t UtilityCache::oracle_calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return oracle_calls_;
}

std::map<std::string, UtilityCache::Values> UtilityCache::Entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::map<std::string, Values> out;
  for (const auto& [key, future] : entries_) {
    if (IsReady(future)) out.emplace(key, future.get());
  }
  return out;
}

std::vector<double> CoalitionUtility(UtilityCache& cache,
                                     const CoalitionModelProvider& provider,
                                     const Coalition& coalition,
                                     const std::vector<RewardTable>& rewards,
                                     const ValueMode& mode) {
  return cache.GetOrCompute(coalition.Key(), [&] {
    const Policy policy = CoalitionModel(provider, coalition);
    std::vector<double> values;
    values.reserve(rewards.size());
    for (const auto& reward : rewards) {
      values.push_back(PolicyValue(policy, reward, mode));
    }
    return values;
  });
}

int PlayerSet::size() const { return std::popcount(bits_); }

std::vector<int> PlayerSet::Members() const {
  std::vector<int> out;
  for (int i = 0; i < 64; ++i) {
    if (Contains(i)) out.push_back(i);
  }
  return out;
}

std::string PlayerSet::ToString() const {
  std::string s = "{";
  bool first = true;
  for (int i : Members()) {
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

namespace {

Coalition NamedCoalition(const std::vector<std::string>& names, PlayerSet s) {
  std::vector<std::string> ids;
  for (int i : s.Members()) {
    if (i >= static_cast<int>(names.size())) {
      throw InvalidInputError("player index " + std::to_string(i) +
                              " has no name");
    }
    ids.push_back(names[i]);
  }
  return Coalition::FromIds(std::move(ids));
}

}  // namespace

UtilityFn CachedUtility(UtilityCache& cache, std::vector<std::string> names,
                        UtilityFn fn) {
  return [&cache, names = std::move(names), fn = std::move(fn)](PlayerSet s) {
    const std::string key = NamedCoalition(names, s).Key();
    try {
      return cache.GetOrCompute(key, [&] { return fn(s); });
    } catch (const OracleError&) {
      throw;
    } catch (const std::exception& e) {
      throw OracleError(
          "utility oracle failed for coalition " + key + ": " + e.what(), key);
    }
  };
}

UtilityFn ProviderUtility(UtilityCache& cache,
                          const CoalitionModelProvider& provider,
                          const std::vector<RewardTable>& rewards,
                          const ValueMode& mode) {
  return [&cache, &provider, &rewards, mode](PlayerSet s) {
    const Coalition coalition = NamedCoalition(provider.source_ids(), s);
    try {
      return CoalitionUtility(cache, provider, coalition, rewards, mode);
    } catch (const std::exception& e) {
      throw OracleError("utility oracle failed for coalition " +
                            coalition.Key() + ": " + e.what(),
                        coalition.Key());
    }
  };
}

std::string ToString(Estimator estimator) {
  switch (estimator) {
    case Estimator::kExact:
      return "exact";
    case Estimator::kMcPermutation:
      return "mc_permutation";
    case Estimator::kRegression:
      return "regression";
  }
  return "unknown";
}

Estimator ParseEstimator(const std::string& name) {
  if (name == "exact") return Estimator::kExact;
  if (name == "mc" || name == "mc_permutation") return Estimator::kMcPermutation;
  if (name == "regression") return Estimator::kRegression;
  throw InvalidInputError("unknown estimator '" + name +
                          "' (expected exact, mc or regression)");
}

namespace {

void CheckPlayers(int n, int max_n) {
  if (n < 1 || n > max_n) {
    throw InvalidInputError("number of players must be in [1, " +
                            std::to_string(max_n) + "], got " +
                            std::to_string(n));
  }
}

std::vector<double> CallOracle(const UtilityFn& utility, PlayerSet s) {
  try {
    return utility(s);
  } catch (const OracleError&) {
    throw;
  } catch (const std::exception& e) {
    throw OracleError("utility oracle failed for coalition " + s.ToString() +
                          ": " + e.what(),
                      s.ToString());
  }
}

// Evaluates every coalition in `sets` (possibly in parallel) and checks that
// all utility vectors have the same, non-zero length.
std::vector<std::vector<double>> EvaluateAll(const std::vector<PlayerSet>& sets,
                                             const UtilityFn& utility,
                                             int jobs) {
  std::vector<std::vector<double>> out(sets.size());
  ParallelFor(sets.size(), jobs,
              [&](std::size_t i) { out[i] = CallOracle(utility, sets[i]); });
  const std::size_t dims = out.empty() ? 0 : out.front().size();
  if (dims == 0) throw InvalidInputError("utility oracle returned no values");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() != dims) {
      throw OracleError("utility oracle returned " +
                            std::to_string(out[i].size()) +
                            " values, expected " + std::to_string(dims),
                        sets[i].ToString());
    }
  }
  return out;
}

double Binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

}  // namespace

ShapleyResult ExactShapley(int n, const UtilityFn& utility, int jobs) {
  CheckPlayers(n, 24);
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<PlayerSet> sets(total);
  for (std::uint64_t m = 0; m < total; ++m) sets[m] = PlayerSet(m);
  const auto u = EvaluateAll(sets, utility, jobs);
  const std::size_t dims = u.front().size();

  // weight[s] = s! (n - s - 1)! / n! = 1 / (n * C(n - 1, s)).
  std::vector<double> weight(n);
  for (int s = 0; s < n; ++s) weight[s] = 1.0 / (n * Binomial(n - 1, s));

  ShapleyResult result;
  result.estimator = Estimator::kExact;
  result.values = Grid(n, dims, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t m = 0; m < total; ++m) {
      if (m & bit) continue;
      const double w = weight[std::popcount(m)];
      for (std::size_t k = 0; k < dims; ++k) {
        result.values(i, k) += w * (u[m | bit][k] - u[m][k]);
      }
    }
  }
  result.coalitions_evaluated = total;
  result.empty_utility = u.front();
  result.full_utility = u.back();
  return result;
}

ShapleyResult McPermutationShapley(int n, const UtilityFn& utility,
                                   const McOptions& options) {
  CheckPlayers(n, 62);
  const int num_perms = options.num_permutations;
  if (num_perms < 1) {
    throw InvalidInputError("num_permutations must be >= 1");
  }
  if (options.stratified && n > 10) {
    throw InvalidInputError("stratified permutations need n <= 10");
  }

  std::vector<std::vector<int>> perms(num_perms);
  std::vector<int> current(n);
  std::iota(current.begin(), current.end(), 0);
  Rng rng = MakeRng(options.seed);
  for (auto& perm : perms) {
    if (options.stratified) {
      perm = current;
      std::next_permutation(current.begin(), current.end());
    } else {
      perm.assign(current.begin(), current.end());
      std::shuffle(perm.begin(), perm.end(), rng);
    }
  }

  // Distinct prefixes, in first-seen order.
  std::vector<PlayerSet> sets;
  std::unordered_map<std::uint64_t, std::size_t> slot;
  auto remember = [&](PlayerSet s) {
    if (slot.emplace(s.bits(), sets.size()).second) sets.push_back(s);
  };
  for (const auto& perm : perms) {
    PlayerSet prefix;
    remember(prefix);
    for (int i : perm) {
      prefix = prefix.With(i);
      remember(prefix);
    }
  }
  const auto u = EvaluateAll(sets, utility, options.jobs);
  const std::size_t dims = u.front().size();

  // marginals[(t * n + i) * dims + k]
  std::vector<double> marginals(static_cast<std::size_t>(num_perms) * n * dims);
  for (int t = 0; t < num_perms; ++t) {
    PlayerSet prefix;
    for (int i : perms[t]) {
      const PlayerSet next = prefix.With(i);
      const auto& before = u[slot.at(prefix.bits())];
      const auto& after = u[slot.at(next.bits())];
      for (std::size_t k = 0; k < dims; ++k) {
        marginals[(static_cast<std::size_t>(t) * n + i) * dims + k] =
            after[k] - before[k];
      }
      prefix = next;
    }
  }

  ShapleyResult result;
  result.estimator = Estimator::kMcPermutation;
  result.values = Grid(n, dims, 0.0);
  Grid se(n, dims, 0.0);
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dims; ++k) {
      double sum = 0.0;
      for (int t = 0; t < num_perms; ++t) {
        sum += marginals[(static_cast<std::size_t>(t) * n + i) * dims + k];
      }
      const double mean = sum / num_perms;
      double ss = 0.0;
      for (int t = 0; t < num_perms; ++t) {
        const double d =
            marginals[(static_cast<std::size_t>(t) * n + i) * dims + k] - mean;
        ss += d * d;
      }
      result.values(i, k) = mean;
      se(i, k) = num_perms > 1
                     ? std::sqrt(ss / (num_perms - 1) / num_perms)
                     : std::numeric_limits<double>::quiet_NaN();
    }
  }
  result.standard_error = std::move(se);
  result.seed = options.seed;
  result.num_permutations = num_perms;
  result.coalitions_evaluated = sets.size();
  result.empty_utility = u[slot.at(0)];
  result.full_utility = u[slot.at(PlayerSet::Full(n).bits())];
  return result;
}

ShapleyResult RegressionShapley(int n, const UtilityFn& utility,
                                const RegressionOptions& options) {
  CheckPlayers(n, 62);
  const PlayerSet full = PlayerSet::Full(n);

  // Interior coalitions with their regression weights.
  std::vector<PlayerSet> sets{PlayerSet(), full};
  std::vector<double> weights{0.0, 0.0};
  if (!options.num_samples) {
    if (n > 24) {
      throw InvalidInputError("full regression needs n <= 24");
    }
    for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << n); ++m) {
      const int s = std::popcount(m);
      sets.emplace_back(m);
      weights.push_back((n - 1) / (Binomial(n, s) * s * (n - s)));
    }
  } else if (n > 1) {
    if (*options.num_samples < 1) {
      throw InvalidInputError("num_samples must be >= 1");
    }
    // Size s with probability proportional to the kernel mass C(n,s) w(S),
    // then a uniform subset of that size; duplicates accumulate weight.
    std::vector<double> size_mass(n - 1);
    for (int s = 1; s < n; ++s) size_mass[s - 1] = 1.0 / (s * (n - s));
    std::discrete_distribution<int> size_dist(size_mass.begin(),
                                              size_mass.end());
    Rng rng = MakeRng(options.seed);
    std::unordered_map<std::uint64_t, std::size_t> slot;
    std::vector<int> order(n);
    for (int draw = 0; draw < *options.num_samples; ++draw) {
      const int s = size_dist(rng) + 1;
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      PlayerSet set;
      for (int j = 0; j < s; ++j) set = set.With(order[j]);
      auto [it, inserted] = slot.emplace(set.bits(), sets.size());
      if (inserted) {
        sets.push_back(set);
        weights.push_back(0.0);
      }
      weights[it->second] += 1.0;
    }
  }

  const auto u = EvaluateAll(sets, utility, options.jobs);
  const std::size_t dims = u.front().size();
  const auto& u_empty = u[0];
  const auto& u_full = u[1];

  ShapleyResult result;
  result.estimator = Estimator::kRegression;
  result.values = Grid(n, dims, 0.0);
  result.seed = options.seed;
  result.num_samples = options.num_samples.value_or(0);
  result.coalitions_evaluated = sets.size();
  result.empty_utility = u_empty;
  result.full_utility = u_full;

  if (n == 1) {
    for (std::size_t k = 0; k < dims; ++k) {
      result.values(0, k) = u_full[k] - u_empty[k];
    }
    return result;
  }

  // Substitute phi_{n-1} = total - sum_{j<n-1} phi_j to enforce efficiency,
  // leaving an unconstrained weighted least squares problem in n-1 unknowns.
  const Eigen::Index rows = static_cast<Eigen::Index>(sets.size() - 2);
  const Eigen::Index cols = n - 1;
  Eigen::MatrixXd design(rows, cols);
  Eigen::MatrixXd target(rows, static_cast<Eigen::Index>(dims));
  const int last = n - 1;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const PlayerSet s = sets[r + 2];
    const double sw = std::sqrt(weights[r + 2]);
    const double z_last = s.Contains(last) ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      design(r, j) = sw * ((s.Contains(static_cast<int>(j)) ? 1.0 : 0.0) - z_last);
    }
    for (std::size_t k = 0; k < dims; ++k) {
      const double total = u_full[k] - u_empty[k];
      target(r, static_cast<Eigen::Index>(k)) =
          sw * (u[r + 2][k] - u_empty[k] - z_last * total);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (rows < cols || qr.rank() < cols) {
    throw RankDeficiencyError(
        "regression design has rank " + std::to_string(qr.rank()) +
        " but " + std::to_string(cols) +
        " is needed; sample more coalitions");
  }
  const Eigen::MatrixXd phi = qr.solve(target);
  for (std::size_t k = 0; k < dims; ++k) {
    double assigned = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      result.values(j, k) = phi(j, static_cast<Eigen::Index>(k));
      assigned += result.values(j, k);
    }
    result.values(last, k) = (u_full[k] - u_empty[k]) - assigned;
  }
  return result;
}

SpatialSignature MakeSpatialSignature(
    const ShapleyResult& result, const std::vector<std::string>& source_ids,
    const std::vector<std::string>& reward_names) {
  if (result.values.rows() != source_ids.size() ||
      result.values.cols() != reward_names.size()) {
    throw InvalidInputError(
        "signature expects " + std::to_string(result.values.rows()) +
        " sources and " + std::to_string(result.values.cols()) +
        " rewards, got " + std::to_string(source_ids.size()) + " and " +
        std::to_string(reward_names.size()));
  }
  SpatialSignature signature;
  signature.reward_names = reward_names;
  for (std::size_t i = 0; i < source_ids.size(); ++i) {
    SignatureRow row;
    row.source = source_ids[i];
    const auto values = result.values.Row(i);
    row.coords.assign(values.begin(), values.end());
    if (!row.coords.empty()) {
      const auto [lo, hi] =
          std::minmax_element(row.coords.begin(), row.coords.end());
      row.diagonal_gap = *hi - *lo;
    }
    signature.rows.push_back(std::move(row));
  }
  return signature;
}

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string SignatureToCsv(const SpatialSignature& signature) {
  std::string out = "source";
  for (const auto& name : signature.reward_names) out += "," + name;
  out += "\n";
  for (const auto& row : signature.rows) {
    out += row.source;
    for (double v : row.coords) out += "," + FormatDouble(v);
    out += "\n";
  }
  return out;
}

}  // namespace prefshap
