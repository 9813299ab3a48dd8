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

// Scene data model, box geometry, ground-truth matching and the three
// reward functions (attribute, predicate, next-object category).

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vrl/action_graph.hpp"
#include "vrl/common.hpp"

namespace vrl {

// Center-size box in abstract scene units.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  double area() const { return w * h; }
  double x0() const { return cx - 0.5 * w; }
  double x1() const { return cx + 0.5 * w; }
  double y0() const { return cy - 0.5 * h; }
  double y1() const { return cy + 0.5 * h; }
  bool valid() const { return w > 0.0 && h > 0.0 && std::isfinite(cx) && std::isfinite(cy); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0());
  const double iy = std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0());
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

// Tight box enclosing both inputs.
inline BoundingBox enclosing_box(const BoundingBox& a, const BoundingBox& b) {
  const double x0 = std::min(a.x0(), b.x0()), x1 = std::max(a.x1(), b.x1());
  const double y0 = std::min(a.y0(), b.y0()), y1 = std::max(a.y1(), b.y1());
  return {0.5 * (x0 + x1), 0.5 * (y0 + y1), x1 - x0, y1 - y0};
}

inline constexpr double kMatchIou = 0.5;

struct ObjectInstance {
  int id = 0;
  BoundingBox box;
  // Sorted by category, unique.
  std::vector<std::pair<CategoryId, double>> category_scores;
  double objectness = 0.0;

  double score(CategoryId c) const {
    auto it = std::lower_bound(category_scores.begin(), category_scores.end(), c,
                               [](const auto& kv, CategoryId k) { return kv.first < k; });
    return (it != category_scores.end() && it->first == c) ? it->second : 0.0;
  }

  // Most confident category; lowest id on ties.
  CategoryId top_category() const {
    VRL_REQUIRE(!category_scores.empty(), "instance has no category scores");
    auto best = category_scores.front();
    for (const auto& kv : category_scores)
      if (kv.second > best.second) best = kv;
    return best.first;
  }

  double max_score() const {
    double m = 0.0;
    for (const auto& kv : category_scores) m = std::max(m, kv.second);
    return m;
  }

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct GtObject {
  CategoryId category;
  BoundingBox box;
  friend bool operator==(const GtObject&, const GtObject&) = default;
};

struct GtAttributePhrase {
  int object = 0;
  AttributeId attribute;
  friend auto operator<=>(const GtAttributePhrase&, const GtAttributePhrase&) = default;
};

struct GtPredicatePhrase {
  int subject = 0;
  PredicateId predicate;
  int object = 0;
  friend auto operator<=>(const GtPredicatePhrase&, const GtPredicatePhrase&) = default;
};

struct GroundTruth {
  std::vector<GtObject> objects;
  std::vector<GtAttributePhrase> attr_phrases;  // sorted, unique
  std::vector<GtPredicatePhrase> pred_phrases;  // sorted, unique

  void normalize() {
    std::sort(attr_phrases.begin(), attr_phrases.end());
    attr_phrases.erase(std::unique(attr_phrases.begin(), attr_phrases.end()), attr_phrases.end());
    std::sort(pred_phrases.begin(), pred_phrases.end());
    pred_phrases.erase(std::unique(pred_phrases.begin(), pred_phrases.end()), pred_phrases.end());
  }

  bool has_attr(int obj, AttributeId a) const {
    return std::binary_search(attr_phrases.begin(), attr_phrases.end(), GtAttributePhrase{obj, a});
  }
  bool has_pred(int subj, PredicateId p, int obj) const {
    return std::binary_search(pred_phrases.begin(), pred_phrases.end(),
                              GtPredicatePhrase{subj, p, obj});
  }

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Scene {
  std::string id;
  std::vector<ObjectInstance> instances;
  GroundTruth gt;
  std::string image_feature_key;

  const ObjectInstance& instance(int inst_id) const {
    auto it = std::find_if(instances.begin(), instances.end(),
                           [&](const ObjectInstance& o) { return o.id == inst_id; });
    if (it == instances.end())
      throw LookupError("scene " + id + " has no instance " + std::to_string(inst_id));
    return *it;
  }

  friend bool operator==(const Scene&, const Scene&) = default;
};

// True iff the instance, labelled with `assigned`, matches the gt object:
// same category and IoU >= 0.5.
inline bool overlaps(const ObjectInstance& inst, CategoryId assigned, const GtObject& gt) {
  return assigned == gt.category && iou(inst.box, gt.box) >= kMatchIou;
}

// Strict inequalities on both axes.
inline bool is_neighbor(const ObjectInstance& s, const ObjectInstance& t) {
  return std::abs(t.box.cx - s.box.cx) < 0.5 * (t.box.w + s.box.w) &&
         std::abs(t.box.cy - s.box.cy) < 0.5 * (t.box.h + s.box.h);
}

// Indices of every gt object the labelled instance overlaps.
inline std::vector<int> matching_gt(const Scene& scene, const ObjectInstance& inst,
                                    CategoryId assigned) {
  std::vector<int> out;
  for (std::size_t i = 0; i < scene.gt.objects.size(); ++i)
    if (overlaps(inst, assigned, scene.gt.objects[i])) out.push_back(static_cast<int>(i));
  return out;
}

// +1 if some gt object overlapping (s, s_cat) carries attribute g_a, -1
// otherwise, 0 for the Null action.
inline int reward_attribute(const Scene& scene, const ObjectInstance& s, CategoryId s_cat,
                            std::optional<AttributeId> g_a) {
  if (!g_a) return 0;
  for (int gi : matching_gt(scene, s, s_cat))
    if (scene.gt.has_attr(gi, *g_a)) return 1;
  return -1;
}

inline int reward_predicate(const Scene& scene, const ObjectInstance& s, CategoryId s_cat,
                            const ObjectInstance& o, CategoryId o_cat,
                            std::optional<PredicateId> g_p) {
  if (!g_p) return 0;
  const auto subj = matching_gt(scene, s, s_cat);
  if (subj.empty()) return -1;
  const auto obj = matching_gt(scene, o, o_cat);
  for (int a : subj)
    for (int b : obj)
      if (scene.gt.has_pred(a, *g_p, b)) return 1;
  return -1;
}

// A category action bound to the instance it selects.
struct ObjectAction {
  CategoryId category;
  int instance = 0;
  friend auto operator<=>(const ObjectAction&, const ObjectAction&) = default;
};

// +5 if the selected (instance, category) overlaps a gt object not yet in
// `discovered`, -1 otherwise, 0 for Terminal (nullopt).
inline int reward_category(const Scene& scene, const std::optional<ObjectAction>& chosen,
                           const std::set<int>& discovered) {
  if (!chosen) return 0;
  const ObjectInstance& inst = scene.instance(chosen->instance);
  for (int gi : matching_gt(scene, inst, chosen->category))
    if (!discovered.contains(gi)) return 5;
  return -1;
}

// Keeps the `cap` most objectness-confident instances (ties: lower id),
// preserving the original list order.
inline void cap_instances(Scene& scene, std::size_t cap) {
  if (scene.instances.size() <= cap) return;
  std::vector<std::size_t> order(scene.instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ia = scene.instances[a];
    const auto& ib = scene.instances[b];
    if (ia.objectness != ib.objectness) return ia.objectness > ib.objectness;
    return ia.id < ib.id;
  });
  order.resize(cap);
  std::sort(order.begin(), order.end());
  std::vector<ObjectInstance> kept;
  kept.reserve(cap);
  for (std::size_t i : order) kept.push_back(std::move(scene.instances[i]));
  scene.instances = std::move(kept);
}

// Throws ContractViolation on the first broken invariant.
inline void validate_scene(const Scene& scene, const SemanticGraph& g) {
  std::set<int> ids;
  auto conf_ok = [](double v) { return v >= 0.0 && v <= 1.0 && std::isfinite(v); };
  for (const auto& inst : scene.instances) {
    VRL_REQUIRE(ids.insert(inst.id).second, "duplicate instance id in scene " + scene.id);
    VRL_REQUIRE(inst.box.valid(), "invalid instance box in scene " + scene.id);
    VRL_REQUIRE(!inst.category_scores.empty(), "instance without scores in scene " + scene.id);
    VRL_REQUIRE(conf_ok(inst.objectness), "objectness outside [0,1] in scene " + scene.id);
    for (std::size_t i = 0; i < inst.category_scores.size(); ++i) {
      const auto& [c, v] = inst.category_scores[i];
      VRL_REQUIRE(c.value >= 0 && c.index() < g.num_categories(), "category out of range");
      VRL_REQUIRE(conf_ok(v), "category score outside [0,1] in scene " + scene.id);
      VRL_REQUIRE(i == 0 || inst.category_scores[i - 1].first < c, "scores not sorted");
    }
  }
  const int n_gt = static_cast<int>(scene.gt.objects.size());
  for (const auto& o : scene.gt.objects) {
    VRL_REQUIRE(o.box.valid(), "invalid gt box in scene " + scene.id);
    VRL_REQUIRE(o.category.value >= 0 && o.category.index() < g.num_categories(),
                "gt category out of range");
  }
  for (const auto& p : scene.gt.attr_phrases) {
    VRL_REQUIRE(p.object >= 0 && p.object < n_gt, "attribute phrase references missing object");
    VRL_REQUIRE(p.attribute.value >= 0 && p.attribute.index() < g.num_attributes(),
                "attribute out of range");
  }
  for (const auto& p : scene.gt.pred_phrases) {
    VRL_REQUIRE(p.subject >= 0 && p.subject < n_gt && p.object >= 0 && p.object < n_gt,
                "predicate phrase references missing object");
    VRL_REQUIRE(p.predicate.value >= 0 && p.predicate.index() < g.num_predicates(),
                "predicate out of range");
  }
}

}  // namespace vrl
