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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "prefshap/arithmetic.h"
#include "prefshap/errors.h"
#include "prefshap/io.h"
#include "prefshap/parallel.h"
#include "prefshap/random.h"

namespace prefshap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int ExitCodeForCurrentException() {
  try {
    throw;
  } catch (const ConvergenceError&) {
    return kExitConvergence;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const InvalidInputError&) {
    return kExitValidation;
  } catch (const LookupError&) {
    return kExitValidation;
  } catch (const DomainError&) {
    return kExitValidation;
  } catch (const RankDeficiencyError&) {
    return kExitValidation;
  } catch (...) {
    return kExitFailure;
  }
}

fs::path PolicyPath(const RunManifest& m, const std::string& id) {
  return m.OutputDir() / "policies" / (id + ".json");
}
fs::path FitDiagnosticsPath(const RunManifest& m) {
  return m.OutputDir() / "fit_diagnostics.json";
}
fs::path ShapleyPath(const RunManifest& m) {
  return m.OutputDir() / "shapley.json";
}
fs::path CachePath(const RunManifest& m) {
  return m.OutputDir() / "utility_cache.json";
}
fs::path SignaturePath(const RunManifest& m) {
  return m.OutputDir() / "signature.csv";
}
fs::path VerifyPath(const RunManifest& m) {
  return m.OutputDir() / "verify.json";
}

namespace {

std::vector<PreferenceDataset> LoadDatasets(const RunManifest& m,
                                            const WorldPtr& world) {
  std::vector<PreferenceDataset> out;
  for (const auto& s : m.sources) {
    out.push_back(LoadDataset(m.Resolve(s.dataset), world, s.id));
  }
  return out;
}

std::map<std::string, Policy> LoadFittedPolicies(const RunManifest& m,
                                                 const WorldPtr& world) {
  std::map<std::string, Policy> out;
  for (const auto& s : m.sources) {
    const fs::path path = PolicyPath(m, s.id);
    if (!fs::exists(path)) {
      throw IoError("no fitted policy for source '" + s.id + "' at '" +
                    path.string() + "'; run `prefshap fit` first");
    }
    out.emplace(s.id, LoadPolicy(path, world));
  }
  return out;
}

std::map<std::string, RewardTable> LoadTruthRewards(const RunManifest& m,
                                                    const WorldPtr& world) {
  std::map<std::string, RewardTable> out;
  for (const auto& s : m.sources) {
    if (!s.truth_reward) {
      throw InvalidInputError("source '" + s.id +
                              "' has no truth_reward in the manifest");
    }
    out.emplace(s.id, LoadRewardTable(m.Resolve(*s.truth_reward), world)
                          .GaugeFixed());
  }
  return out;
}

std::string Fingerprint(const std::vector<fs::path>& files,
                        const std::string& extra) {
  std::string blob = extra;
  for (const auto& f : files) blob += '\0' + ReadFile(f);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016zx", std::hash<std::string>{}(blob));
  return hex;
}

json FitEntryToJson(const SourceFitStatus& s) {
  return {{"id", s.id},
          {"status", s.status},
          {"iterations", s.iterations},
          {"grad_norm", s.grad_norm},
          {"message", s.message}};
}

}  // namespace

fs::path CmdGen(const GenOptions& options) {
  const WorldSpec& spec = options.spec;
  spec.Validate();
  if (spec.num_responses < 2) {
    throw InvalidInputError(
        "--responses must be at least 2 to generate preference pairs");
  }
  options.alignment.Validate();
  const SyntheticWorld sw = MakeRandomWorld(spec);
  const fs::path& out = options.out_dir;

  RunManifest m;
  m.world = "world.json";
  m.reference = "reference.json";
  m.alignment = options.alignment;
  m.seed = spec.seed;
  m.generator = spec;
  SaveWorld(*sw.world, out / m.world);
  SavePolicy(sw.reference, out / m.reference);
  for (std::size_t i = 0; i < sw.source_ids.size(); ++i) {
    const std::string& id = sw.source_ids[i];
    SourceEntry entry{id, fs::path("data") / (id + ".jsonl"),
                      fs::path("truth") / (id + ".json"),
                      DeriveSeed(spec.seed, i)};
    SaveDataset(GeneratePreferences(sw.truth_rewards[i], spec.pairs_per_source,
                                    *entry.seed, id),
                out / entry.dataset);
    SaveRewardTable(sw.truth_rewards[i], out / *entry.truth_reward);
    m.sources.push_back(std::move(entry));
  }
  for (std::size_t k = 0; k < sw.eval_names.size(); ++k) {
    EvalRewardEntry entry{sw.eval_names[k],
                          fs::path("eval") / (sw.eval_names[k] + ".json")};
    SaveRewardTable(sw.eval_rewards[k], out / entry.path);
    m.eval_rewards.push_back(std::move(entry));
  }
  const fs::path manifest_path = out / "manifest.json";
  SaveManifest(m, manifest_path);
  return manifest_path;
}

bool FitReport::all_ok() const {
  return std::none_of(sources.begin(), sources.end(),
                      [](const auto& s) { return s.status == "failed"; });
}

FitReport CmdFit(const RunManifest& manifest, int jobs, bool force) {
  manifest.Validate();
  const WorldPtr world = LoadWorld(manifest.Resolve(manifest.world));
  const Policy reference = LoadPolicy(manifest.Resolve(manifest.reference), world);
  const std::vector<PreferenceDataset> datasets = LoadDatasets(manifest, world);

  std::map<std::string, json> previous;
  if (fs::exists(FitDiagnosticsPath(manifest))) {
    const json old = ParseJson(ReadFile(FitDiagnosticsPath(manifest)),
                               FitDiagnosticsPath(manifest).string());
    for (const auto& e : old.value("sources", json::array())) {
      previous[e.value("id", std::string())] = e;
    }
  }

  const std::size_t n = manifest.sources.size();
  FitReport report;
  report.sources.resize(n);
  std::vector<std::optional<Policy>> policies(n);
  std::vector<std::size_t> to_fit;
  for (std::size_t i = 0; i < n; ++i) {
    auto& status = report.sources[i];
    status.id = manifest.sources[i].id;
    if (!force && fs::exists(PolicyPath(manifest, status.id))) {
      status.status = "cached";
      continue;
    }
    if (datasets[i].empty()) {
      status.status = "dummy";
      status.message = "empty dataset; policy equals the reference";
      policies[i] = reference;
      continue;
    }
    to_fit.push_back(i);
  }

  ParallelFor(to_fit.size(), jobs, [&](std::size_t k) {
    const std::size_t i = to_fit[k];
    auto& status = report.sources[i];
    try {
      DpoFitResult fit =
          DpoFitWithDiagnostics(reference, datasets[i], manifest.alignment);
      status.status = "fitted";
      status.iterations = fit.iterations;
      status.grad_norm = fit.grad_norm;
      policies[i] = std::move(fit.policy);
    } catch (const ConvergenceError& e) {
      status.status = "failed";
      status.iterations = e.iterations();
      status.grad_norm = e.grad_norm();
      status.message = e.what();
    }
  });
  report.fits_performed = static_cast<int>(to_fit.size());

  // Single writer, after every fit has finished.
  bool changed = false;
  json entries = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& status = report.sources[i];
    const fs::path path = PolicyPath(manifest, status.id);
    if (policies[i]) {
      SavePolicy(*policies[i], path, status.id);
      changed = true;
    } else if (status.status == "failed") {
      fs::remove(path);
      changed = true;
    }
    if (status.status == "cached" && previous.contains(status.id)) {
      entries.push_back(previous[status.id]);
    } else {
      entries.push_back(FitEntryToJson(status));
    }
  }
  WriteFile(FitDiagnosticsPath(manifest),
            DumpJson({{"alignment", AlignmentConfigToJson(manifest.alignment)},
                      {"sources", entries}}));
  if (changed) fs::remove(CachePath(manifest));
  return report;
}

ShapleyReport CmdShapley(const RunManifest& manifest,
                         const ShapleyOptions& options) {
  manifest.Validate();
  if (manifest.eval_rewards.empty()) {
    throw InvalidInputError("manifest lists no evaluation rewards");
  }
  const WorldPtr world = LoadWorld(manifest.Resolve(manifest.world));
  Policy reference = LoadPolicy(manifest.Resolve(manifest.reference), world);
  const auto provider = CoalitionModelProvider::Composed(
      std::move(reference), LoadFittedPolicies(manifest, world));

  std::vector<RewardTable> rewards;
  std::vector<std::string> reward_names;
  std::vector<fs::path> inputs{manifest.Resolve(manifest.world),
                               manifest.Resolve(manifest.reference)};
  for (const auto& s : manifest.sources) inputs.push_back(PolicyPath(manifest, s.id));
  for (const auto& e : manifest.eval_rewards) {
    rewards.push_back(LoadRewardTable(manifest.Resolve(e.path), world));
    reward_names.push_back(e.name);
    inputs.push_back(manifest.Resolve(e.path));
  }

  const EstimatorSpec& spec = manifest.estimator;
  const Estimator estimator = options.estimator.value_or(spec.kind);
  const std::uint64_t seed = options.seed.value_or(manifest.seed);
  ValueMode mode = ExactValue{};
  std::string mode_tag = "exact";
  if (spec.eval_samples) {
    mode = SampledValue{*spec.eval_samples, seed};
    mode_tag = "sampled:" + std::to_string(*spec.eval_samples) + ":" +
               std::to_string(seed);
  }

  UtilityCache cache;
  const std::string fingerprint = Fingerprint(inputs, mode_tag);
  if (options.reuse_cache && fs::exists(CachePath(manifest))) {
    UtilityCacheFromJson(
        ParseJson(ReadFile(CachePath(manifest)), CachePath(manifest).string()),
        fingerprint, cache);
  }
  const UtilityFn utility = ProviderUtility(cache, provider, rewards, mode);
  const int n = static_cast<int>(provider.source_ids().size());

  ShapleyResult result;
  switch (estimator) {
    case Estimator::kExact:
      result = ExactShapley(n, utility, options.jobs);
      result.seed = seed;
      break;
    case Estimator::kMcPermutation:
      result = McPermutationShapley(
          n, utility,
          {options.perms.value_or(spec.perms), seed,
           options.stratified.value_or(spec.stratified), options.jobs});
      break;
    case Estimator::kRegression:
      result = RegressionShapley(
          n, utility,
          {options.samples.value_or(spec.samples), seed, options.jobs});
      break;
  }
  result.players = provider.source_ids();
  result.reward_names = reward_names;

  ShapleyReport report{result, cache.oracle_calls(), cache.size()};
  json out = ShapleyResultToJson(result);
  out["metadata"]["oracle_calls"] = report.oracle_calls;
  out["metadata"]["cache_entries"] = report.cache_entries;
  WriteFile(ShapleyPath(manifest), DumpJson(out));
  WriteFile(CachePath(manifest), DumpJson(UtilityCacheToJson(cache, fingerprint)));
  WriteFile(SignaturePath(manifest),
            SignatureToCsv(MakeSpatialSignature(result, result.players,
                                                result.reward_names)));
  return report;
}

SpatialSignature CmdSignature(const RunManifest& manifest) {
  const fs::path path = ShapleyPath(manifest);
  if (!fs::exists(path)) {
    throw IoError("no Shapley result at '" + path.string() +
                  "'; run `prefshap shapley` first");
  }
  const ShapleyResult result =
      ShapleyResultFromJson(ParseJson(ReadFile(path), path.string()));
  SpatialSignature signature =
      MakeSpatialSignature(result, result.players, result.reward_names);
  WriteFile(SignaturePath(manifest), SignatureToCsv(signature));
  return signature;
}

VerifyReport CmdVerify(const RunManifest& manifest,
                       const VerifyOptions& options) {
  manifest.Validate();
  const WorldPtr world = LoadWorld(manifest.Resolve(manifest.world));
  const Policy reference =
      LoadPolicy(manifest.Resolve(manifest.reference), world);
  const std::vector<PreferenceDataset> datasets = LoadDatasets(manifest, world);
  const auto truth = LoadTruthRewards(manifest, world);
  const AlignmentConfig& config = manifest.alignment;
  const double beta = config.beta;
  const std::size_t n = manifest.sources.size();
  if (n > 16) throw InvalidInputError("verify enumerates 2^n coalitions; n <= 16");

  // DPO fits per source: from `fit` output when present, otherwise here.
  std::map<std::string, Policy> fitted;
  {
    std::vector<std::optional<Policy>> slots(n);
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < n; ++i) {
      const fs::path path = PolicyPath(manifest, manifest.sources[i].id);
      if (fs::exists(path)) {
        slots[i] = LoadPolicy(path, world);
      } else {
        missing.push_back(i);
      }
    }
    ParallelFor(missing.size(), options.jobs, [&](std::size_t k) {
      const std::size_t i = missing[k];
      slots[i] = datasets[i].empty() ? reference
                                     : DpoFit(reference, datasets[i], config);
    });
    for (std::size_t i = 0; i < n; ++i) {
      fitted.emplace(manifest.sources[i].id, std::move(*slots[i]));
    }
  }

  std::map<std::string, Policy> per_source;
  if (options.exact_inputs) {
    for (const auto& [id, reward] : truth) {
      per_source.emplace(id, ExactAlignedPolicy(reference, reward, beta));
    }
  } else {
    per_source = fitted;
  }

  VerifyReport report;
  report.exact_inputs = options.exact_inputs;

  // (a) Composition vs the closed form over the truth rewards.
  const auto composed = CoalitionModelProvider::Composed(reference, per_source);
  const auto oracle =
      CoalitionModelProvider::ExactOracle(reference, truth, beta);
  const std::vector<std::string>& ids = composed.source_ids();
  const std::uint64_t total = std::uint64_t{1} << ids.size();
  std::vector<double> log_gap(total), tv(total);
  ParallelFor(total, options.jobs, [&](std::size_t mask) {
    std::vector<std::string> members;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if ((mask >> i) & 1u) members.push_back(ids[i]);
    }
    const Coalition c = Coalition::FromIds(std::move(members));
    const Policy a = CoalitionModel(composed, c);
    const Policy b = CoalitionModel(oracle, c);
    log_gap[mask] = MaxAbsDiff(a.log_probs(), b.log_probs());
    tv[mask] = MaxTotalVariation(a, b);
  });
  report.coalitions_checked = total;
  report.composition_max_log_gap = *std::max_element(log_gap.begin(), log_gap.end());
  report.composition_max_tv = *std::max_element(tv.begin(), tv.end());

  // (b) Sequential DPO in two orders vs composition of the DPO fits.
  std::vector<std::string> chosen = options.coalition;
  if (chosen.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!datasets[i].empty()) chosen.push_back(manifest.sources[i].id);
    }
  }
  report.sequential_coalition = chosen;
  if (!chosen.empty()) {
    std::vector<PreferenceDataset> ordered;
    std::vector<RewardTable> fitted_rewards;
    for (const auto& id : chosen) {
      auto it = std::find_if(manifest.sources.begin(), manifest.sources.end(),
                             [&](const auto& s) { return s.id == id; });
      if (it == manifest.sources.end()) {
        throw LookupError("unknown source '" + id + "' in --coalition");
      }
      const auto& data = datasets[it - manifest.sources.begin()];
      ordered.push_back(data);
      fitted_rewards.push_back(FitBtReward(data, config.l2, config.optimizer()));
    }
    std::vector<PreferenceDataset> reversed(ordered.rbegin(), ordered.rend());
    std::vector<std::optional<Policy>> seq(2);
    ParallelFor(2, options.jobs, [&](std::size_t k) {
      seq[k] = SequentialDpo(reference, k == 0 ? ordered : reversed, config);
    });
    const auto fitted_provider =
        CoalitionModelProvider::Composed(reference, fitted);
    const Policy joint =
        ComposeCoalition(fitted_provider, Coalition::FromIds(chosen));
    const Policy reward_oracle =
        ExactCoalitionPolicy(reference, fitted_rewards, beta);
    report.sequential_tv_between_orders = MaxTotalVariation(*seq[0], *seq[1]);
    report.sequential_tv_vs_composed =
        std::max(MaxTotalVariation(*seq[0], joint),
                 MaxTotalVariation(*seq[1], joint));
    report.sequential_tv_vs_fitted_reward_oracle =
        std::max(MaxTotalVariation(*seq[0], reward_oracle),
                 MaxTotalVariation(*seq[1], reward_oracle));
  }

  // (c) Implicit reward recovery.
  for (const auto& [id, policy] : per_source) {
    const RewardTable implicit = ImplicitReward(policy, reference, beta);
    report.implicit_reward_max_error =
        std::max(report.implicit_reward_max_error,
                 MaxAbsDiff(implicit.values(), truth.at(id).values()));
  }

  report.passed = !(options.exact_inputs &&
                    !(report.composition_max_log_gap <= kCompositionTolerance));

  json out = {
      {"mode", options.exact_inputs ? "exact_inputs" : "fitted"},
      {"composition",
       {{"coalitions", report.coalitions_checked},
        {"max_abs_log_prob_gap", report.composition_max_log_gap},
        {"max_tv", report.composition_max_tv},
        {"tolerance", kCompositionTolerance}}},
      {"sequential",
       {{"coalition", report.sequential_coalition},
        {"tv_between_orders", report.sequential_tv_between_orders},
        {"tv_vs_composed", report.sequential_tv_vs_composed},
        {"tv_vs_fitted_reward_oracle",
         report.sequential_tv_vs_fitted_reward_oracle}}},
      {"implicit_reward", {{"max_abs_error", report.implicit_reward_max_error}}},
      {"passed", report.passed}};
  WriteFile(VerifyPath(manifest), DumpJson(out));
  return report;
}

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  unexpected failure\n"
    "  2  validation error (flags, manifest or input content)\n"
    "  3  convergence failure\n"
    "  4  verification failure (composition gap above 1e-9 with "
    "--exact-inputs)\n"
    "  5  I/O error or missing prerequisite file";

void PrintFit(const FitReport& report) {
  for (const auto& s : report.sources) {
    std::cout << s.id << ": " << s.status;
    if (s.status == "fitted") {
      std::cout << " (" << s.iterations << " iterations, gradient norm "
                << s.grad_norm << ")";
    }
    if (!s.message.empty() && s.status != "fitted") {
      std::cout << " - " << s.message;
    }
    std::cout << "\n";
  }
  std::cout << "fits performed: " << report.fits_performed << "\n";
}

void PrintSignature(const SpatialSignature& signature) {
  std::cout << "source";
  for (const auto& name : signature.reward_names) std::cout << "\t" << name;
  std::cout << "\tdiagonal_gap\n";
  for (const auto& row : signature.rows) {
    std::cout << row.source;
    for (double v : row.coords) std::cout << "\t" << v;
    std::cout << "\t" << row.diagonal_gap << "\n";
  }
}

}  // namespace

int RunCli(int argc, char** argv) {
  CLI::App app{"prefshap: Shapley valuation of preference-data sources with "
               "training-free coalition policies"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);
  app.fallthrough();

  std::string manifest_path = "manifest.json";
  std::uint64_t seed = 0;
  int jobs = 0;
  bool force = false;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_option("--manifest", manifest_path, "Run manifest JSON");
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  app.add_flag("--force", force, "Recompute outputs that already exist");

  WorldSpec spec;
  AlignmentConfig alignment;
  std::string out_dir = "run";
  auto* gen = app.add_subcommand("gen", "Generate a synthetic world and data");
  gen->add_option("--sources", spec.num_sources, "Number of data sources");
  gen->add_option("--prompts", spec.num_prompts, "Number of prompts");
  gen->add_option("--responses", spec.num_responses, "Number of responses");
  gen->add_option("--pairs", spec.pairs_per_source, "Preference pairs per source");
  gen->add_option("--reward-scale", spec.reward_scale, "Std-dev of rewards");
  gen->add_option("--eval-rewards", spec.num_eval_rewards,
                  "Number of evaluation rewards");
  gen->add_option("--beta", alignment.beta, "KL strength written to the manifest");
  gen->add_option("--out", out_dir, "Output directory");

  auto* fit = app.add_subcommand("fit", "Run one DPO fit per source");

  std::string estimator_name;
  int perms = 0;
  std::string samples;
  bool stratified = false;
  bool reuse_cache = false;
  auto* shap = app.add_subcommand("shapley", "Compute Shapley values");
  auto* est_opt = shap->add_option("--estimator", estimator_name,
                                   "exact | mc | regression");
  auto* perms_opt = shap->add_option("--perms", perms, "Permutations (mc)");
  auto* samples_opt = shap->add_option(
      "--samples", samples, "Coalitions for regression: 'full' or a count");
  auto* strat_opt = shap->add_flag("--stratified", stratified,
                                   "Enumerate permutations instead of sampling");
  shap->add_flag("--reuse-cache", reuse_cache,
                 "Reuse utility_cache.json when the inputs are unchanged");

  bool exact_inputs = false;
  std::vector<std::string> coalition;
  auto* verify = app.add_subcommand("verify", "Check the composition identity");
  verify->add_flag("--exact-inputs", exact_inputs,
                   "Build per-source policies from the truth rewards");
  verify->add_option("--coalition", coalition,
                     "Sources for the sequential DPO check")
      ->delimiter(',');

  auto* signature = app.add_subcommand("signature",
                                       "Rewrite and print the spatial signature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const int workers = ResolveJobs(jobs);
    if (gen->parsed()) {
      spec.seed = seed;
      const fs::path path = CmdGen({spec, out_dir, alignment});
      std::cout << "wrote " << path.string() << "\n";
      return kExitOk;
    }
    const RunManifest manifest = LoadManifest(manifest_path);
    if (fit->parsed()) {
      const FitReport report = CmdFit(manifest, workers, force);
      PrintFit(report);
      return report.all_ok() ? kExitOk : kExitConvergence;
    }
    if (shap->parsed()) {
      ShapleyOptions options;
      if (*est_opt) options.estimator = ParseEstimator(estimator_name);
      if (*perms_opt) options.perms = perms;
      if (*samples_opt) {
        if (samples == "full") {
          options.samples = std::optional<int>();
        } else {
          try {
            options.samples = std::optional<int>(std::stoi(samples));
          } catch (const std::exception&) {
            throw InvalidInputError("--samples must be 'full' or an integer");
          }
        }
      }
      if (*strat_opt) options.stratified = stratified;
      if (*seed_opt) options.seed = seed;
      options.jobs = workers;
      options.reuse_cache = reuse_cache;
      const ShapleyReport report = CmdShapley(manifest, options);
      std::cout << "estimator: " << ToString(report.result.estimator)
                << "\nutility oracle calls: " << report.oracle_calls
                << "\ncache entries: " << report.cache_entries << "\n";
      PrintSignature(MakeSpatialSignature(report.result, report.result.players,
                                          report.result.reward_names));
      return kExitOk;
    }
    if (verify->parsed()) {
      const VerifyReport r =
          CmdVerify(manifest, {exact_inputs, coalition, workers});
      std::cout << "composition: " << r.coalitions_checked
                << " coalitions, max |log-prob gap| "
                << r.composition_max_log_gap << ", max TV "
                << r.composition_max_tv << "\n"
                << "sequential DPO: TV between orders "
                << r.sequential_tv_between_orders << ", TV vs composed "
                << r.sequential_tv_vs_composed
                << ", TV vs fitted-reward closed form "
                << r.sequential_tv_vs_fitted_reward_oracle << "\n"
                << "implicit reward: max error " << r.implicit_reward_max_error
                << "\n"
                << (r.passed ? "PASS" : "FAIL") << "\n";
      return r.passed ? kExitOk : kExitVerification;
    }
    if (signature->parsed()) {
      PrintSignature(CmdSignature(manifest));
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeForCurrentException();
  }
  return kExitFailure;
}

}  // namespace prefshap::cli
