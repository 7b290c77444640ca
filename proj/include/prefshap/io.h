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

#ifndef PREFSHAP_IO_H_
#define PREFSHAP_IO_H_

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "prefshap/policy.h"
#include "prefshap/reward.h"
#include "prefshap/valuation.h"
#include "prefshap/world.h"

namespace prefshap {

// All loaders throw IoError for unreadable files or malformed JSON, and the
// domain errors of the corresponding constructors for invalid content.
// Writers create missing parent directories and emit pretty-printed JSON with
// shortest round-trip number formatting, so equal inputs give byte-identical
// files.

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& content);

// {"prompts": [...], "responses": [...], "eval_dist": [...]}
nlohmann::json WorldToJson(const World& world);
WorldPtr WorldFromJson(const nlohmann::json& j);
WorldPtr LoadWorld(const std::filesystem::path& path);
void SaveWorld(const World& world, const std::filesystem::path& path);

// {"source": "...", "log_probs": [[...]]}; -inf is written as null. The
// source field is optional.
nlohmann::json PolicyToJson(const Policy& policy,
                            const std::optional<std::string>& source = {});
Policy PolicyFromJson(const nlohmann::json& j, WorldPtr world);
Policy LoadPolicy(const std::filesystem::path& path, WorldPtr world);
void SavePolicy(const Policy& policy, const std::filesystem::path& path,
                const std::optional<std::string>& source = {});

// {"gauge": "zero_mean_per_prompt" | "raw", "values": [[...]]}
nlohmann::json RewardTableToJson(const RewardTable& reward);
RewardTable RewardTableFromJson(const nlohmann::json& j, WorldPtr world);
RewardTable LoadRewardTable(const std::filesystem::path& path, WorldPtr world);
void SaveRewardTable(const RewardTable& reward,
                     const std::filesystem::path& path);

// One {"prompt": ..., "chosen": ..., "rejected": ...} object per line.
// Identifiers may be strings or integer positions in the world's lists;
// blank lines are skipped. Writers always emit strings.
PreferenceDataset LoadDataset(const std::filesystem::path& path, WorldPtr world,
                              std::string source_id);
std::string DatasetToJsonl(const PreferenceDataset& data);
void SaveDataset(const PreferenceDataset& data,
                 const std::filesystem::path& path);

// {"estimator", "seed", "sources", "rewards", "values", "stderr" | null,
//  "metadata": {...}}. NaN entries are written as null.
nlohmann::json ShapleyResultToJson(const ShapleyResult& result);
ShapleyResult ShapleyResultFromJson(const nlohmann::json& j);

// {"fingerprint": "...", "entries": {"[s0,s1]": [...], ...}}
nlohmann::json UtilityCacheToJson(const UtilityCache& cache,
                                  const std::string& fingerprint);
// Loads entries into `cache` if the stored fingerprint matches; returns
// whether it did.
bool UtilityCacheFromJson(const nlohmann::json& j,
                          const std::string& fingerprint, UtilityCache& cache);

// Serializes with two-space indentation and a trailing newline.
std::string DumpJson(const nlohmann::json& j);
nlohmann::json ParseJson(const std::string& text, const std::string& origin);

}  // namespace prefshap

#endif  // PREFSHAP_IO_H_
