// Copyright 2026 The VRL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration, run manifests and variant comparisons shared by the
// command-line tool and the acceptance harness.

#pragma once

#include <algorithm>
#include <filesystem>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vrl/agent.hpp"
#include "vrl/eval.hpp"
#include "vrl/scene_io.hpp"

namespace vrl {

// Feature source: a precomputed feature file, or the synthetic provider
// seeded by `seed` when `file` is empty.
struct FeatureSource {
  FeatureConfig cfg{32, 32, 16, 0};
  std::string file;
  std::uint64_t seed = 0;
  double noise = 0.3;

  std::unique_ptr<FeatureProvider> make(std::size_t num_categories) const {
    if (!file.empty()) return std::make_unique<FileFeatureProvider>(file);
    return std::make_unique<SyntheticFeatureProvider>(num_categories, cfg.d_image, cfg.d_instance, seed, noise);
  }

  nlohmann::json to_json() const {
    return {{"d_image", cfg.d_image}, {"d_instance", cfg.d_instance}, {"d_phrase", cfg.d_phrase},
            {"phrase_seed", cfg.phrase_seed}, {"file", file}, {"seed", seed}, {"noise", noise}};
  }
  static FeatureSource from_json(const nlohmann::json& j) {
    FeatureSource f;
    auto get = [&](const char* k, auto& field) {
      if (j.contains(k)) j.at(k).get_to(field);
    };
    get("d_image", f.cfg.d_image);
    get("d_instance", f.cfg.d_instance);
    get("d_phrase", f.cfg.d_phrase);
    get("phrase_seed", f.cfg.phrase_seed);
    get("file", f.file);
    get("seed", f.seed);
    get("noise", f.noise);
    return f;
  }
};

// Contents of a training config file. Relative paths are resolved against
// the directory holding the config.
struct RunConfig {
  std::uint64_t seed = 1;
  PolicyVariant variant = PolicyVariant::kVrl;
  std::string graph;
  std::string train_scenes;
  std::string validation_scenes;  // optional
  std::string out;
  FeatureSource features;
  TrainConfig train;

  nlohmann::json to_json() const {
    return {{"seed", seed},
            {"variant", to_string(variant)},
            {"graph", graph},
            {"train_scenes", train_scenes},
            {"validation_scenes", validation_scenes},
            {"out", out},
            {"features", features.to_json()},
            {"train", train.to_json()}};
  }

  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
    RunConfig c;
    auto path = [&](const char* k, std::string& field) {
      if (!j.contains(k)) return;
      field = j.at(k).get<std::string>();
      if (!field.empty() && std::filesystem::path(field).is_relative() && !base.empty())
        field = (base / field).lexically_normal().string();
    };
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
    path("graph", c.graph);
    path("train_scenes", c.train_scenes);
    path("validation_scenes", c.validation_scenes);
    path("out", c.out);
    if (j.contains("features")) c.features = FeatureSource::from_json(j.at("features"));
    if (!c.features.file.empty() && std::filesystem::path(c.features.file).is_relative() && !base.empty())
      c.features.file = (base / c.features.file).lexically_normal().string();
    if (j.contains("train")) c.train = TrainConfig::from_json(j.at("train"));
    return c;
  }

  static RunConfig load(const std::string& path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
      return from_json(j, std::filesystem::path(path).parent_path());
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw IngestError(path + ": " + e.what());
    }
  }
};

// Provenance of a trained model: which inputs produced it. Hashes are
// recomputed from the referenced files and compared by `verify`.
struct RunManifest {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string graph_path;
  std::string scenes_path;
  std::uint64_t graph_hash = 0;
  std::uint64_t scene_hash = 0;
  PolicyVariant variant = PolicyVariant::kVrl;
  std::string out_dir;

  nlohmann::json to_json() const {
    return {{"config", config_path},       {"seed", seed},
            {"graph", graph_path},         {"scenes", scenes_path},
            {"graph_hash", hex64(graph_hash)}, {"scene_hash", hex64(scene_hash)},
            {"variant", to_string(variant)}, {"out", out_dir}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.config_path = j.at("config").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.graph_path = j.at("graph").get<std::string>();
    m.scenes_path = j.at("scenes").get<std::string>();
    m.graph_hash = std::stoull(j.at("graph_hash").get<std::string>(), nullptr, 16);
    m.scene_hash = std::stoull(j.at("scene_hash").get<std::string>(), nullptr, 16);
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.out_dir = j.at("out").get<std::string>();
    return m;
  }

  static RunManifest load(const std::string& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw IngestError(path + ": " + e.what());
    }
  }

  // Throws IngestError when the inputs no longer hash to the recorded values.
  void verify(const SemanticGraph& g, const std::vector<Scene>& scenes) const {
    if (g.content_hash() != graph_hash)
      throw IngestError(graph_path + ": graph hash " + hex64(g.content_hash()) + " does not match manifest " +
                        hex64(graph_hash));
    if (scene_set_hash(scenes, g) != scene_hash)
      throw IngestError(scenes_path + ": scene-set hash does not match manifest " + hex64(scene_hash));
  }
};

// Trains (for learned variants) on `train_scenes` and evaluates greedily on
// `test`. Evaluation RNG streams derive from `seed`.
struct VariantResult {
  PolicyVariant variant = PolicyVariant::kVrl;
  std::uint64_t seed = 0;
  RecallSummary summary;
  std::vector<EpochMetrics> timeline;
};

inline VariantResult run_variant(const std::vector<Scene>& train_scenes, const std::vector<Scene>& validation,
                                 const std::vector<Scene>& test, AgentContext ctx, PolicyVariant variant,
                                 std::uint64_t seed, int jobs = 1,
                                 const std::set<PredicateType>* unseen = nullptr) {
  ctx.variant = variant;
  VariantResult r;
  r.variant = variant;
  r.seed = seed;
  std::vector<std::vector<Prediction>> ranked;
  if (is_learned(variant)) {
    TrainResult tr = train(train_scenes, validation, ctx, seed);
    r.timeline = std::move(tr.timeline);
    ranked = predict_scenes(test, ctx, &tr.model, seed, jobs);
  } else {
    ranked = predict_scenes(test, ctx, nullptr, seed, jobs);
  }
  r.summary = summarize_recall(test, ranked, unseen);
  return r;
}

inline std::string ablation_csv(const std::vector<VariantResult>& rows, bool with_zero_shot) {
  std::ostringstream os;
  os.precision(10);
  os << "variant,seed,phrase@50,phrase@100,relationship@50,relationship@100,attribute@50,attribute@100";
  if (with_zero_shot) os << ",zs_phrase@50,zs_phrase@100,zs_relationship@50,zs_relationship@100";
  os << '\n';
  for (const auto& r : rows) {
    os << to_string(r.variant) << ',' << r.seed;
    for (int t = 0; t < 3; ++t)
      for (int k = 0; k < 2; ++k) os << ',' << r.summary.recall[t][k];
    if (with_zero_shot)
      for (int t = 0; t < 2; ++t)
        for (int k = 0; k < 2; ++k) os << ',' << r.summary.zero_shot[t][k];
    os << '\n';
  }
  return os.str();
}

inline double median(std::vector<double> v) {
  VRL_REQUIRE(!v.empty(), "median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// A seed-determined subset holding round(fraction * |edges|) (at least one)
// of the graph's predicate edge types.
inline std::set<PredicateType> pick_holdout_types(const SemanticGraph& g, double fraction, std::uint64_t seed) {
  std::vector<PredicateType> all;
  for (const auto& [c, p, c2] : g.predicate_edges()) all.emplace_back(c, p, c2);
  Rng rng = make_stream(seed, "holdout");
  std::shuffle(all.begin(), all.end(), rng);
  const auto n = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(fraction * static_cast<double>(all.size()))),
                                         all.empty() ? 0 : 1, all.size());
  return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace vrl
