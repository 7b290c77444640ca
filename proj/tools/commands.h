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

#ifndef PREFSHAP_TOOLS_COMMANDS_H_
#define PREFSHAP_TOOLS_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "manifest.h"
#include "prefshap/alignment.h"
#include "prefshap/synthgen.h"
#include "prefshap/valuation.h"

namespace prefshap::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,       // unexpected errors
  kExitValidation = 2,    // bad flags, manifest or input content
  kExitConvergence = 3,   // an optimizer did not reach its tolerance
  kExitVerification = 4,  // `verify` found a composition gap above 1e-9
  kExitIo = 5,            // missing or unreadable files
};

// Maps the exception currently being handled to an exit code.
int ExitCodeForCurrentException();

// Output layout below RunManifest::OutputDir().
std::filesystem::path PolicyPath(const RunManifest& m, const std::string& id);
std::filesystem::path FitDiagnosticsPath(const RunManifest& m);
std::filesystem::path ShapleyPath(const RunManifest& m);
std::filesystem::path CachePath(const RunManifest& m);
std::filesystem::path SignaturePath(const RunManifest& m);
std::filesystem::path VerifyPath(const RunManifest& m);

// --- gen -------------------------------------------------------------------

struct GenOptions {
  WorldSpec spec;
  std::filesystem::path out_dir;
  AlignmentConfig alignment;
};

// Writes world.json, reference.json, data/<id>.jsonl, truth/<id>.json,
// eval/<name>.json and manifest.json under out_dir; returns the manifest
// path. Throws InvalidInputError when options.spec is invalid or has fewer than
// two responses.
std::filesystem::path CmdGen(const GenOptions& options);

// --- fit -------------------------------------------------------------------

struct SourceFitStatus {
  std::string id;
  std::string status;  // fitted | cached | dummy | failed
  int iterations = 0;
  double grad_norm = 0.0;
  std::string message;
};

struct FitReport {
  int fits_performed = 0;  // DPO optimizations actually run
  std::vector<SourceFitStatus> sources;
  bool all_ok() const;
};

// One DPO fit per source, run concurrently. Sources whose policy file already
// exists are skipped unless `force`; sources with an empty dataset get the
// reference as their policy. A convergence failure is recorded for its source
// and does not stop the others.
FitReport CmdFit(const RunManifest& manifest, int jobs, bool force);

// --- shapley ---------------------------------------------------------------

struct ShapleyOptions {
  std::optional<Estimator> estimator;  // default: manifest
  std::optional<int> perms;
  std::optional<std::optional<int>> samples;  // outer: override; inner: full
  std::optional<bool> stratified;
  std::optional<std::uint64_t> seed;  // default: manifest seed
  int jobs = 1;
  // Seed the utility cache from a previous run's utility_cache.json when its
  // fingerprint matches the current inputs.
  bool reuse_cache = false;
};

struct ShapleyReport {
  ShapleyResult result;
  std::size_t oracle_calls = 0;  // utility evaluations performed this run
  std::size_t cache_entries = 0;
};

// Composes coalition policies from the fitted per-source policies, values
// them under every evaluation reward and writes shapley.json,
// utility_cache.json and signature.csv. Throws IoError naming `fit` when a
// policy is missing.
ShapleyReport CmdShapley(const RunManifest& manifest,
                         const ShapleyOptions& options);

// --- signature -------------------------------------------------------------

// Rebuilds signature.csv from shapley.json.
SpatialSignature CmdSignature(const RunManifest& manifest);

// --- verify ----------------------------------------------------------------

struct VerifyOptions {
  // Build per-source policies from the truth rewards in closed form instead
  // of loading the fitted ones; the composition gap must then be <= 1e-9.
  bool exact_inputs = false;
  // Coalition for the sequential DPO check; default all non-empty sources.
  std::vector<std::string> coalition;
  int jobs = 1;
};

struct VerifyReport {
  bool exact_inputs = false;
  // (a) composed vs closed-form coalition policy over the truth rewards.
  std::size_t coalitions_checked = 0;
  double composition_max_log_gap = 0.0;
  double composition_max_tv = 0.0;
  // (b) sequential DPO.
  std::vector<std::string> sequential_coalition;
  double sequential_tv_between_orders = 0.0;
  double sequential_tv_vs_composed = 0.0;
  double sequential_tv_vs_fitted_reward_oracle = 0.0;
  // (c) implicit reward of each per-source policy vs its truth reward.
  double implicit_reward_max_error = 0.0;

  bool passed = true;
};

inline constexpr double kCompositionTolerance = 1e-9;

// Requires truth rewards in the manifest. Writes verify.json.
VerifyReport CmdVerify(const RunManifest& manifest,
                       const VerifyOptions& options);

// Entry point of the `prefshap` executable.
int RunCli(int argc, char** argv);

}  // namespace prefshap::cli

#endif  // PREFSHAP_TOOLS_COMMANDS_H_
