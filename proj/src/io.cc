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

#include "prefshap/io.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "prefshap/errors.h"

namespace prefshap {

using nlohmann::json;

namespace {

json GridToJson(const Grid& grid) {
  json rows = json::array();
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    json row = json::array();
    for (double v : grid.Row(r)) {
      if (std::isfinite(v)) {
        row.push_back(v);
      } else {
        row.push_back(nullptr);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// null entries become `null_value`.
Grid GridFromJson(const json& j, double null_value, const char* what) {
  if (!j.is_array()) throw InvalidInputError(std::string(what) + " must be an array");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) {
      throw InvalidInputError(std::string(what) + " must be an array of arrays");
    }
    std::vector<double> values;
    for (const auto& v : row) {
      if (v.is_null()) {
        values.push_back(null_value);
      } else if (v.is_number()) {
        values.push_back(v.get<double>());
      } else {
        throw InvalidInputError(std::string(what) + " entries must be numbers");
      }
    }
    rows.push_back(std::move(values));
  }
  return Grid::FromRows(rows);
}

template <typename T>
T Field(const json& j, const char* key, const std::string& origin) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidInputError(origin + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInputError(origin + ": bad field '" + key + "': " + e.what());
  }
}

std::size_t ResolveId(const json& v, const std::vector<std::string>& names,
                      std::size_t (World::*lookup)(const std::string&) const,
                      const World& world, const std::string& origin) {
  if (v.is_string()) return (world.*lookup)(v.get<std::string>());
  if (v.is_number_unsigned()) {
    const auto idx = v.get<std::size_t>();
    if (idx >= names.size()) {
      throw LookupError(origin + ": index " + std::to_string(idx) +
                        " out of range");
    }
    return idx;
  }
  throw InvalidInputError(origin + ": identifiers must be strings or indices");
}

}  // namespace

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory '" +
                    path.parent_path().string() + "': " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string DumpJson(const json& j) { return j.dump(2) + "\n"; }

json ParseJson(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(origin + ": invalid JSON: " + e.what());
  }
}

json WorldToJson(const World& world) {
  return {{"prompts", world.prompts()},
          {"responses", world.responses()},
          {"eval_dist", world.eval_dist()}};
}

WorldPtr WorldFromJson(const json& j) {
  const std::string origin = "world";
  return std::make_shared<const World>(
      Field<std::vector<std::string>>(j, "prompts", origin),
      Field<std::vector<std::string>>(j, "responses", origin),
      Field<std::vector<double>>(j, "eval_dist", origin));
}

WorldPtr LoadWorld(const std::filesystem::path& path) {
  return WorldFromJson(ParseJson(ReadFile(path), path.string()));
}

void SaveWorld(const World& world, const std::filesystem::path& path) {
  WriteFile(path, DumpJson(WorldToJson(world)));
}

json PolicyToJson(const Policy& policy,
                  const std::optional<std::string>& source) {
  json j = json::object();
  if (source) j["source"] = *source;
  j["log_probs"] = GridToJson(policy.log_probs());
  return j;
}

Policy PolicyFromJson(const json& j, WorldPtr world) {
  if (!j.is_object() || !j.contains("log_probs")) {
    throw InvalidInputError("policy: missing field 'log_probs'");
  }
  return Policy(std::move(world),
                GridFromJson(j.at("log_probs"),
                             -std::numeric_limits<double>::infinity(),
                             "log_probs"));
}

Policy LoadPolicy(const std::filesystem::path& path, WorldPtr world) {
  return PolicyFromJson(ParseJson(ReadFile(path), path.string()),
                        std::move(world));
}

void SavePolicy(const Policy& policy, const std::filesystem::path& path,
                const std::optional<std::string>& source) {
  WriteFile(path, DumpJson(PolicyToJson(policy, source)));
}

json RewardTableToJson(const RewardTable& reward) {
  return {{"gauge", ToString(reward.gauge())},
          {"values", GridToJson(reward.values())}};
}

RewardTable RewardTableFromJson(const json& j, WorldPtr world) {
  const std::string origin = "reward table";
  const Gauge gauge = ParseGauge(Field<std::string>(j, "gauge", origin));
  if (!j.contains("values")) throw InvalidInputError(origin + ": missing 'values'");
  return RewardTable(
      std::move(world),
      GridFromJson(j.at("values"), std::numeric_limits<double>::quiet_NaN(),
                   "values"),
      gauge);
}

RewardTable LoadRewardTable(const std::filesystem::path& path, WorldPtr world) {
  return RewardTableFromJson(ParseJson(ReadFile(path), path.string()),
                             std::move(world));
}

void SaveRewardTable(const RewardTable& reward,
                     const std::filesystem::path& path) {
  WriteFile(path, DumpJson(RewardTableToJson(reward)));
}

PreferenceDataset LoadDataset(const std::filesystem::path& path, WorldPtr world,
                              std::string source_id) {
  std::istringstream in(ReadFile(path));
  std::vector<PreferenceTriple> triples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string origin = path.string() + ":" + std::to_string(line_no);
    const json j = ParseJson(line, origin);
    for (const char* key : {"prompt", "chosen", "rejected"}) {
      if (!j.is_object() || !j.contains(key)) {
        throw InvalidInputError(origin + ": missing field '" + key + "'");
      }
    }
    triples.push_back(
        {ResolveId(j["prompt"], world->prompts(), &World::PromptIndex, *world,
                   origin),
         ResolveId(j["chosen"], world->responses(), &World::ResponseIndex,
                   *world, origin),
         ResolveId(j["rejected"], world->responses(), &World::ResponseIndex,
                   *world, origin)});
  }
  return PreferenceDataset(std::move(world), std::move(source_id),
                           std::move(triples));
}

std::string DatasetToJsonl(const PreferenceDataset& data) {
  const World& world = data.world();
  std::string out;
  for (const auto& t : data.triples()) {
    const json line = {{"prompt", world.prompts()[t.prompt]},
                       {"chosen", world.responses()[t.chosen]},
                       {"rejected", world.responses()[t.rejected]}};
    out += line.dump() + "\n";
  }
  return out;
}

void SaveDataset(const PreferenceDataset& data,
                 const std::filesystem::path& path) {
  WriteFile(path, DatasetToJsonl(data));
}

json ShapleyResultToJson(const ShapleyResult& result) {
  std::vector<std::string> players = result.players;
  if (players.empty()) {
    for (std::size_t i = 0; i < result.values.rows(); ++i) {
      players.push_back(std::to_string(i));
    }
  }
  std::vector<std::string> rewards = result.reward_names;
  if (rewards.empty()) {
    for (std::size_t k = 0; k < result.values.cols(); ++k) {
      rewards.push_back("reward" + std::to_string(k));
    }
  }
  json j = {{"estimator", ToString(result.estimator)},
            {"seed", result.seed},
            {"sources", players},
            {"rewards", rewards},
            {"values", GridToJson(result.values)}};
  j["stderr"] = result.standard_error ? GridToJson(*result.standard_error)
                                      : json(nullptr);
  j["metadata"] = {{"num_permutations", result.num_permutations},
                   {"num_samples", result.num_samples},
                   {"coalitions_evaluated", result.coalitions_evaluated},
                   {"empty_utility", result.empty_utility},
                   {"full_utility", result.full_utility}};
  return j;
}

ShapleyResult ShapleyResultFromJson(const json& j) {
  const std::string origin = "shapley result";
  ShapleyResult result;
  result.estimator = ParseEstimator(Field<std::string>(j, "estimator", origin));
  result.seed = Field<std::uint64_t>(j, "seed", origin);
  result.players = Field<std::vector<std::string>>(j, "sources", origin);
  result.reward_names = Field<std::vector<std::string>>(j, "rewards", origin);
  if (!j.contains("values")) throw InvalidInputError(origin + ": missing 'values'");
  const double kNaN = std::numeric_limits<double>::quiet_NaN();
  result.values = GridFromJson(j.at("values"), kNaN, "values");
  if (j.contains("stderr") && !j.at("stderr").is_null()) {
    result.standard_error = GridFromJson(j.at("stderr"), kNaN, "stderr");
  }
  if (j.contains("metadata")) {
    const json& m = j.at("metadata");
    result.num_permutations = m.value("num_permutations", 0);
    result.num_samples = m.value("num_samples", 0);
    result.coalitions_evaluated =
        m.value("coalitions_evaluated", std::size_t{0});
    result.empty_utility =
        m.value("empty_utility", std::vector<double>{});
    result.full_utility = m.value("full_utility", std::vector<double>{});
  }
  if (result.players.size() != result.values.rows() ||
      result.reward_names.size() != result.values.cols()) {
    throw InvalidInputError(origin + ": labels do not match the value matrix");
  }
  return result;
}

json UtilityCacheToJson(const UtilityCache& cache,
                        const std::string& fingerprint) {
  json entries = json::object();
  for (const auto& [key, values] : cache.Entries()) entries[key] = values;
  return {{"fingerprint", fingerprint}, {"entries", entries}};
}

bool UtilityCacheFromJson(const json& j, const std::string& fingerprint,
                          UtilityCache& cache) {
  if (!j.is_object() || j.value("fingerprint", std::string()) != fingerprint) {
    return false;
  }
  if (!j.contains("entries") || !j.at("entries").is_object()) {
    throw InvalidInputError("utility cache: missing 'entries'");
  }
  for (const auto& [key, values] : j.at("entries").items()) {
    cache.Insert(key, values.get<std::vector<double>>());
  }
  return true;
}

}  // namespace prefshap
