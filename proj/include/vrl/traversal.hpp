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

// Variation-structured action sets. Each step the agent chooses from
//
//   attributes  {a : (s_c, a) in E_A} minus the attributes already mined
//               for the subject                       ({Null} when empty)
//   predicates  {p : (s_c, p, o_c) in E_P}            ({Null} when empty)
//   objects     (c, t) for every unvisited neighbor t of the subject and
//               every category c within `margin` of t's best score, plus
//               Terminal
//
// and a breadth-first scheduler decides which instance is the subject.

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "vrl/action_graph.hpp"
#include "vrl/scene.hpp"

namespace vrl {

inline constexpr double kAmbiguityMargin = 0.1;
inline constexpr int kNeighborCap = 5;

using AttributeAction = std::optional<AttributeId>;  // nullopt: Null
using PredicateAction = std::optional<PredicateId>;  // nullopt: Null
using CategoryAction = std::optional<ObjectAction>;  // nullopt: Terminal

struct ActionSets {
  std::vector<AttributeAction> attributes;
  std::vector<PredicateAction> predicates;
  std::vector<CategoryAction> objects;  // always contains Terminal
};

struct TraversalHistory {
  std::set<int> visited_instances;                       // H_S
  std::map<int, std::set<AttributeId>> mined_attrs;      // H_A(s)
  std::set<std::tuple<int, PredicateId, int>> emitted_pred_triples;

  bool visited(int id) const { return visited_instances.contains(id); }
};

// {c : score(c) >= max_score - margin}; the boundary is inclusive up to a
// 1e-12 rounding slack. Ascending category order; always contains the top
// category.
inline std::vector<CategoryId> candidate_categories(const ObjectInstance& inst,
                                                    double margin = kAmbiguityMargin) {
  VRL_REQUIRE(!inst.category_scores.empty(), "instance has no category scores");
  const double threshold = inst.max_score() - margin - 1e-12;
  std::vector<CategoryId> out;
  for (const auto& [c, v] : inst.category_scores)
    if (v >= threshold) out.push_back(c);
  return out;
}

inline std::vector<AttributeAction> build_attribute_actions(const SemanticGraph& g,
                                                            CategoryId s_cat,
                                                            const TraversalHistory& hist,
                                                            int s_id) {
  std::vector<AttributeAction> out;
  auto mined = hist.mined_attrs.find(s_id);
  for (AttributeId a : g.attributes_of(s_cat))
    if (mined == hist.mined_attrs.end() || !mined->second.contains(a)) out.emplace_back(a);
  if (out.empty()) out.emplace_back(std::nullopt);
  return out;
}

inline std::vector<PredicateAction> build_predicate_actions(const SemanticGraph& g,
                                                            CategoryId s_cat, CategoryId o_cat) {
  std::vector<PredicateAction> out;
  for (PredicateId p : g.predicates_between(s_cat, o_cat)) out.emplace_back(p);
  if (out.empty()) out.emplace_back(std::nullopt);
  return out;
}

// Δc for subject s. With top1_only, each neighbor contributes only its most
// confident category (no ambiguity-aware mining).
inline std::vector<CategoryAction> build_category_actions(const Scene& scene,
                                                          const ObjectInstance& s,
                                                          const TraversalHistory& hist,
                                                          double margin = kAmbiguityMargin,
                                                          bool top1_only = false) {
  std::vector<CategoryAction> out;
  for (const auto& t : scene.instances) {
    if (t.id == s.id || hist.visited(t.id) || !is_neighbor(s, t)) continue;
    if (top1_only) {
      out.emplace_back(ObjectAction{t.top_category(), t.id});
    } else {
      for (CategoryId c : candidate_categories(t, margin)) out.emplace_back(ObjectAction{c, t.id});
    }
  }
  std::sort(out.begin(), out.end());
  out.emplace_back(std::nullopt);
  return out;
}

// Among the candidates in delta_c carrying category g_c, the instance with
// the highest score for g_c; ties go to the lowest instance id.
inline int resolve_category_action(const Scene& scene, CategoryId g_c,
                                   const std::vector<CategoryAction>& delta_c) {
  int best = -1;
  double best_score = -1.0;
  for (const auto& act : delta_c) {
    if (!act || act->category != g_c) continue;
    const double sc = scene.instance(act->instance).score(g_c);
    if (sc > best_score || (sc == best_score && act->instance < best)) {
      best = act->instance;
      best_score = sc;
    }
  }
  if (best < 0) throw ContractViolation("category action not in the object action set");
  return best;
}

struct SubjectScheduler {
  std::deque<int> queue;
  std::optional<int> current_subject;
  int neighbor_count = 0;
  std::set<int> started;
  bool initialized = false;
};

// Records that instance `id` was selected as the next object of the current
// subject: marks it visited, enqueues it for breadth-first expansion and
// bumps the neighbor counter.
inline void record_object_selection(SubjectScheduler& sched, TraversalHistory& hist, int id,
                                    int cap = kNeighborCap) {
  VRL_REQUIRE(sched.neighbor_count < cap, "neighbor cap exceeded");
  hist.visited_instances.insert(id);
  sched.queue.push_back(id);
  ++sched.neighbor_count;
}

inline bool neighbor_cap_reached(const SubjectScheduler& sched, int cap = kNeighborCap) {
  return sched.neighbor_count >= cap;
}

// Moves to the next subject. The first call returns the instance with the
// highest objectness; later calls pop the breadth-first queue, skipping
// instances that already served as subject, and fall back to the
// highest-objectness unstarted instance when the queue is empty. nullopt
// means every instance has been a subject (Done).
inline std::optional<int> advance_subject(SubjectScheduler& sched, const Scene& scene,
                                          TraversalHistory& hist) {
  auto best_unstarted = [&]() -> std::optional<int> {
    const ObjectInstance* best = nullptr;
    for (const auto& inst : scene.instances) {
      if (sched.started.contains(inst.id)) continue;
      if (!best || inst.objectness > best->objectness ||
          (inst.objectness == best->objectness && inst.id < best->id))
        best = &inst;
    }
    if (!best) return std::nullopt;
    return best->id;
  };
  std::optional<int> next;
  if (sched.initialized) {
    while (!sched.queue.empty() && !next) {
      const int id = sched.queue.front();
      sched.queue.pop_front();
      if (!sched.started.contains(id)) next = id;
    }
  }
  if (!next) next = best_unstarted();
  sched.initialized = true;
  sched.current_subject = next;
  sched.neighbor_count = 0;
  if (next) {
    sched.started.insert(*next);
    hist.visited_instances.insert(*next);
  }
  return next;
}

}  // namespace vrl
