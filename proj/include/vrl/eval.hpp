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

// Prediction ranking, Recall@K for phrase / relationship / attribute
// detection, and zero-shot splits.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "vrl/action_graph.hpp"
#include "vrl/scene.hpp"

namespace vrl {

enum class PredictionKind { kRelationship, kAttribute };

struct PredictedInstance {
  int instance = 0;
  CategoryId category;
  BoundingBox box;
  double confidence = 0.0;  // detector objectness
};

struct Prediction {
  PredictionKind kind = PredictionKind::kAttribute;
  PredictedInstance subject;
  std::optional<PredictedInstance> object;  // relationships only
  std::int32_t label = 0;                   // PredicateId or AttributeId value
  double q_value = 0.0;
  double score = 0.0;

  PredicateId predicate() const { return PredicateId(label); }
  AttributeId attribute() const { return AttributeId(label); }
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// conf_s * conf_o * sigmoid(q) for relationships, conf_s * sigmoid(q) for
// attributes.
inline double rank_score(const Prediction& p) {
  double s = p.subject.confidence * logistic(p.q_value);
  if (p.kind == PredictionKind::kRelationship && p.object) s *= p.object->confidence;
  return s;
}

// Scores every prediction and sorts descending; ties keep insertion order.
inline std::vector<Prediction> rank_predictions(std::vector<Prediction> preds) {
  for (auto& p : preds) p.score = rank_score(p);
  std::stable_sort(preds.begin(), preds.end(),
                   [](const Prediction& a, const Prediction& b) { return a.score > b.score; });
  return preds;
}

enum class Task { kPhrase, kRelationship, kAttribute };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::kPhrase: return "phrase";
    case Task::kRelationship: return "relationship";
    case Task::kAttribute: return "attribute";
  }
  return "?";
}

using PredicateType = std::tuple<CategoryId, PredicateId, CategoryId>;

struct RecallCount {
  std::size_t matched = 0;
  std::size_t total = 0;
  double ratio() const { return total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total); }
};

inline bool matches(const Prediction& p, const Scene& scene, Task task, std::size_t gt_index) {
  const auto& objs = scene.gt.objects;
  if (task == Task::kAttribute) {
    if (p.kind != PredictionKind::kAttribute) return false;
    const auto& ph = scene.gt.attr_phrases[gt_index];
    const auto& o = objs[static_cast<std::size_t>(ph.object)];
    return p.attribute() == ph.attribute && p.subject.category == o.category &&
           iou(p.subject.box, o.box) >= kMatchIou;
  }
  if (p.kind != PredictionKind::kRelationship || !p.object) return false;
  const auto& ph = scene.gt.pred_phrases[gt_index];
  const auto& s = objs[static_cast<std::size_t>(ph.subject)];
  const auto& o = objs[static_cast<std::size_t>(ph.object)];
  if (p.predicate() != ph.predicate || p.subject.category != s.category ||
      p.object->category != o.category)
    return false;
  if (task == Task::kRelationship)
    return iou(p.subject.box, s.box) >= kMatchIou && iou(p.object->box, o.box) >= kMatchIou;
  return iou(enclosing_box(p.subject.box, p.object->box), enclosing_box(s.box, o.box)) >= kMatchIou;
}

// Counts gt phrases of the task's kind covered by at least one of the top-k
// ranked predictions; each gt phrase counts once. With `only_types`, the
// relationship / phrase tasks consider just gt phrases of those types.
inline RecallCount recall_count(std::span<const Prediction> ranked, const Scene& scene, std::size_t k,
                                Task task, const std::set<PredicateType>* only_types = nullptr) {
  VRL_REQUIRE(k >= 1, "k must be >= 1");
  const std::size_t top = std::min(k, ranked.size());
  const std::size_t n_gt =
      task == Task::kAttribute ? scene.gt.attr_phrases.size() : scene.gt.pred_phrases.size();
  RecallCount rc;
  for (std::size_t gi = 0; gi < n_gt; ++gi) {
    if (only_types && task != Task::kAttribute) {
      const auto& ph = scene.gt.pred_phrases[gi];
      const PredicateType type{scene.gt.objects[static_cast<std::size_t>(ph.subject)].category,
                               ph.predicate,
                               scene.gt.objects[static_cast<std::size_t>(ph.object)].category};
      if (!only_types->contains(type)) continue;
    }
    ++rc.total;
    for (std::size_t i = 0; i < top; ++i)
      if (matches(ranked[i], scene, task, gi)) {
        ++rc.matched;
        break;
      }
  }
  return rc;
}

inline double recall_at_k(std::span<const Prediction> ranked, const Scene& scene, std::size_t k,
                          Task task, const std::set<PredicateType>* only_types = nullptr) {
  return recall_count(ranked, scene, k, task, only_types).ratio();
}

struct ZeroShotSplit {
  std::set<PredicateType> unseen_types;
};

inline std::set<PredicateType> predicate_types(const std::vector<Scene>& scenes) {
  std::set<PredicateType> out;
  for (const auto& s : scenes)
    for (const auto& ph : s.gt.pred_phrases)
      out.emplace(s.gt.objects[static_cast<std::size_t>(ph.subject)].category, ph.predicate,
                  s.gt.objects[static_cast<std::size_t>(ph.object)].category);
  return out;
}

// Typed predicate phrases present in test gt but absent from training gt.
inline ZeroShotSplit zero_shot_split(const std::vector<Scene>& train, const std::vector<Scene>& test) {
  const auto seen = predicate_types(train);
  ZeroShotSplit z;
  for (const auto& t : predicate_types(test))
    if (!seen.contains(t)) z.unseen_types.insert(t);
  return z;
}

// Macro average of per-scene Recall@K; scenes with no gt phrase of the
// task's kind (after type restriction) are skipped.
class RecallAccumulator {
 public:
  void add(const RecallCount& rc) {
    if (rc.total == 0) return;
    sum_ += rc.ratio();
    ++scenes_;
  }
  double mean() const { return scenes_ == 0 ? 0.0 : sum_ / static_cast<double>(scenes_); }
  std::size_t scenes() const { return scenes_; }

 private:
  double sum_ = 0.0;
  std::size_t scenes_ = 0;
};

struct RecallSummary {
  // [task][0] = R@50, [task][1] = R@100, tasks ordered phrase, relationship, attribute.
  double recall[3][2] = {{0, 0}, {0, 0}, {0, 0}};
  double zero_shot[2][2] = {{0, 0}, {0, 0}};  // phrase, relationship
  std::size_t scenes = 0;
  std::size_t zero_shot_scenes = 0;

  double at(Task t, std::size_t k) const { return recall[static_cast<int>(t)][k == 50 ? 0 : 1]; }
};

// Aggregates ranked per-scene predictions into the six Recall@{50,100}
// numbers, plus zero-shot variants when `unseen` is given.
inline RecallSummary summarize_recall(const std::vector<Scene>& scenes,
                                      const std::vector<std::vector<Prediction>>& ranked,
                                      const std::set<PredicateType>* unseen = nullptr) {
  VRL_REQUIRE(scenes.size() == ranked.size(), "one prediction list per scene");
  RecallAccumulator acc[3][2];
  RecallAccumulator zs[2][2];
  const std::size_t ks[2] = {50, 100};
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    for (Task t : {Task::kPhrase, Task::kRelationship, Task::kAttribute})
      for (int j = 0; j < 2; ++j)
        acc[static_cast<int>(t)][j].add(recall_count(ranked[i], scenes[i], ks[j], t));
    if (unseen)
      for (Task t : {Task::kPhrase, Task::kRelationship})
        for (int j = 0; j < 2; ++j)
          zs[static_cast<int>(t)][j].add(recall_count(ranked[i], scenes[i], ks[j], t, unseen));
  }
  RecallSummary s;
  s.scenes = scenes.size();
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 2; ++j) s.recall[t][j] = acc[t][j].mean();
  for (int t = 0; t < 2; ++t)
    for (int j = 0; j < 2; ++j) s.zero_shot[t][j] = zs[t][j].mean();
  s.zero_shot_scenes = zs[static_cast<int>(Task::kRelationship)][0].scenes();
  return s;
}

inline nlohmann::json recall_report(const RecallSummary& s, bool with_zero_shot) {
  nlohmann::json j;
  for (Task t : {Task::kPhrase, Task::kRelationship, Task::kAttribute})
    j[task_name(t)] = {{"recall@50", s.at(t, 50)}, {"recall@100", s.at(t, 100)}};
  if (with_zero_shot) {
    j["zero_shot"] = {
        {"phrase", {{"recall@50", s.zero_shot[0][0]}, {"recall@100", s.zero_shot[0][1]}}},
        {"relationship", {{"recall@50", s.zero_shot[1][0]}, {"recall@100", s.zero_shot[1][1]}}},
        {"scene_count", s.zero_shot_scenes}};
  }
  j["scene_count"] = s.scenes;
  return j;
}

}  // namespace vrl
