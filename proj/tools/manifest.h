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

#ifndef PREFSHAP_TOOLS_MANIFEST_H_
#define PREFSHAP_TOOLS_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prefshap/alignment.h"
#include "prefshap/synthgen.h"
#include "prefshap/valuation.h"

namespace prefshap::cli {

struct SourceEntry {
  std::string id;
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> truth_reward;
  std::optional<std::uint64_t> seed;  // generation seed, informational

  friend bool operator==(const SourceEntry&, const SourceEntry&) = default;
};

struct EvalRewardEntry {
  std::string name;
  std::filesystem::path path;

  friend bool operator==(const EvalRewardEntry&,
                         const EvalRewardEntry&) = default;
};

struct EstimatorSpec {
  Estimator kind = Estimator::kExact;
  int perms = 1000;
  std::optional<int> samples;  // nullopt = all coalitions
  bool stratified = false;
  // When set, policy values are sampled over this many prompts instead of
  // computed exactly.
  std::optional<int> eval_samples;

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

// Everything a run needs. Relative paths are resolved against `base_dir`,
// the directory holding the manifest file; base_dir itself is not
// serialized.
struct RunManifest {
  std::filesystem::path world;
  std::filesystem::path reference;
  std::vector<SourceEntry> sources;
  AlignmentConfig alignment;
  std::vector<EvalRewardEntry> eval_rewards;
  EstimatorSpec estimator;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
  std::optional<WorldSpec> generator;

  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::filesystem::path& p) const;
  std::filesystem::path OutputDir() const { return Resolve(output_dir); }

  // Throws IoError naming the first referenced input file that does not
  // exist, and InvalidInputError for duplicate or malformed ids.
  void Validate() const;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

nlohmann::json ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(const nlohmann::json& j,
                             std::filesystem::path base_dir);
RunManifest LoadManifest(const std::filesystem::path& path);
void SaveManifest(const RunManifest& manifest,
                  const std::filesystem::path& path);

nlohmann::json AlignmentConfigToJson(const AlignmentConfig& config);
AlignmentConfig AlignmentConfigFromJson(const nlohmann::json& j);

}  // namespace prefshap::cli

#endif  // PREFSHAP_TOOLS_MANIFEST_H_
