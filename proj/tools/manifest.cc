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

#include "manifest.h"

#include <set>

#include "prefshap/arithmetic.h"
#include "prefshap/errors.h"
#include "prefshap/io.h"

namespace prefshap::cli {

using nlohmann::json;

namespace {

template <typename T>
T Get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidInputError(std::string("manifest: missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("manifest: bad field '") + key + "': " +
                  e.what());
  }
}

json WorldSpecToJson(const WorldSpec& spec) {
  return {{"prompts", spec.num_prompts},
          {"responses", spec.num_responses},
          {"sources", spec.num_sources},
          {"reward_scale", spec.reward_scale},
          {"pairs_per_source", spec.pairs_per_source},
          {"eval_rewards", spec.num_eval_rewards},
          {"seed", spec.seed}};
}

WorldSpec WorldSpecFromJson(const json& j) {
  WorldSpec spec;
  spec.num_prompts = Get<int>(j, "prompts");
  spec.num_responses = Get<int>(j, "responses");
  spec.num_sources = Get<int>(j, "sources");
  spec.reward_scale = Get<double>(j, "reward_scale");
  spec.pairs_per_source = Get<int>(j, "pairs_per_source");
  spec.num_eval_rewards = Get<int>(j, "eval_rewards");
  spec.seed = Get<std::uint64_t>(j, "seed");
  return spec;
}

}  // namespace

json AlignmentConfigToJson(const AlignmentConfig& config) {
  return {{"beta", config.beta},         {"step_size", config.step_size},
          {"max_iters", config.max_iters}, {"tol", config.tol},
          {"l2", config.l2},             {"method", ToString(config.method)}};
}

AlignmentConfig AlignmentConfigFromJson(const json& j) {
  AlignmentConfig config;
  if (!j.is_object()) throw InvalidInputError("manifest: 'alignment' must be an object");
  config.beta = j.value("beta", config.beta);
  config.step_size = j.value("step_size", config.step_size);
  config.max_iters = j.value("max_iters", config.max_iters);
  config.tol = j.value("tol", config.tol);
  config.l2 = j.value("l2", config.l2);
  if (j.contains("method")) {
    config.method = ParseOptimizerMethod(j.at("method").get<std::string>());
  }
  config.Validate();
  return config;
}

std::filesystem::path RunManifest::Resolve(
    const std::filesystem::path& p) const {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

void RunManifest::Validate() const {
  auto require = [&](const std::filesystem::path& p, const std::string& what) {
    if (!std::filesystem::exists(Resolve(p))) {
      throw IoError("manifest references missing " + what + " '" +
                    Resolve(p).string() + "'");
    }
  };
  require(world, "world file");
  require(reference, "reference policy");
  if (sources.empty()) throw InvalidInputError("manifest lists no sources");
  std::set<std::string> ids;
  for (const auto& s : sources) {
    ValidateSourceId(s.id);
    if (!ids.insert(s.id).second) {
      throw InvalidInputError("manifest lists source '" + s.id + "' twice");
    }
    require(s.dataset, "dataset");
    if (s.truth_reward) require(*s.truth_reward, "truth reward");
  }
  std::set<std::string> names;
  for (const auto& e : eval_rewards) {
    if (e.name.empty() || !names.insert(e.name).second) {
      throw InvalidInputError("evaluation reward names must be unique and "
                              "non-empty");
    }
    require(e.path, "evaluation reward");
  }
  alignment.Validate();
}

json ManifestToJson(const RunManifest& m) {
  json sources = json::array();
  for (const auto& s : m.sources) {
    json entry = {{"id", s.id}, {"dataset", s.dataset.generic_string()}};
    entry["truth_reward"] =
        s.truth_reward ? json(s.truth_reward->generic_string()) : json(nullptr);
    entry["seed"] = s.seed ? json(*s.seed) : json(nullptr);
    sources.push_back(std::move(entry));
  }
  json evals = json::array();
  for (const auto& e : m.eval_rewards) {
    evals.push_back({{"name", e.name}, {"path", e.path.generic_string()}});
  }
  json estimator = {{"kind", ToString(m.estimator.kind)},
                    {"perms", m.estimator.perms},
                    {"stratified", m.estimator.stratified}};
  estimator["samples"] =
      m.estimator.samples ? json(*m.estimator.samples) : json("full");
  estimator["eval_samples"] = m.estimator.eval_samples
                                  ? json(*m.estimator.eval_samples)
                                  : json(nullptr);
  json j = {{"world", m.world.generic_string()},
            {"reference", m.reference.generic_string()},
            {"sources", sources},
            {"eval_rewards", evals},
            {"alignment", AlignmentConfigToJson(m.alignment)},
            {"estimator", estimator},
            {"output_dir", m.output_dir.generic_string()},
            {"seed", m.seed}};
  j["generator"] = m.generator ? WorldSpecToJson(*m.generator) : json(nullptr);
  return j;
}

RunManifest ManifestFromJson(const json& j, std::filesystem::path base_dir) {
  RunManifest m;
  m.base_dir = std::move(base_dir);
  m.world = Get<std::string>(j, "world");
  m.reference = Get<std::string>(j, "reference");
  for (const auto& s : Get<json>(j, "sources")) {
    SourceEntry entry;
    entry.id = Get<std::string>(s, "id");
    entry.dataset = Get<std::string>(s, "dataset");
    if (s.contains("truth_reward") && !s.at("truth_reward").is_null()) {
      entry.truth_reward = s.at("truth_reward").get<std::string>();
    }
    if (s.contains("seed") && !s.at("seed").is_null()) {
      entry.seed = s.at("seed").get<std::uint64_t>();
    }
    m.sources.push_back(std::move(entry));
  }
  if (j.contains("eval_rewards")) {
    for (const auto& e : j.at("eval_rewards")) {
      m.eval_rewards.push_back(
          {Get<std::string>(e, "name"), Get<std::string>(e, "path")});
    }
  }
  if (j.contains("alignment")) {
    m.alignment = AlignmentConfigFromJson(j.at("alignment"));
  }
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    m.estimator.kind = ParseEstimator(e.value("kind", std::string("exact")));
    m.estimator.perms = e.value("perms", m.estimator.perms);
    m.estimator.stratified = e.value("stratified", false);
    if (e.contains("samples") && e.at("samples").is_number_integer()) {
      m.estimator.samples = e.at("samples").get<int>();
    }
    if (e.contains("eval_samples") && !e.at("eval_samples").is_null()) {
      m.estimator.eval_samples = e.at("eval_samples").get<int>();
    }
  }
  m.output_dir = j.value("output_dir", std::string("."));
  m.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("generator") && !j.at("generator").is_null()) {
    m.generator = WorldSpecFromJson(j.at("generator"));
  }
  return m;
}

RunManifest LoadManifest(const std::filesystem::path& path) {
  return ManifestFromJson(ParseJson(ReadFile(path), path.string()),
                          path.parent_path());
}

void SaveManifest(const RunManifest& manifest,
                  const std::filesystem::path& path) {
  WriteFile(path, DumpJson(ManifestToJson(manifest)));
}

}  // namespace prefshap::cli
