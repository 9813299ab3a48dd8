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

// Desk-scale synthetic data: phrase-count dumps for graph building and
// abstract scenes whose ground truth is drawn from graph edges.
//
// A SyntheticWorld fixes the statistics shared by all scenes of a data
// set: category / predicate / attribute popularity (Zipf over a seeded
// permutation) and, for each category, a "decoy" category that the
// simulated detector confuses it with. Decoys are drawn from the least
// popular categories, so resolving an ambiguous detection towards the more
// plausible category is learnable from experience.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "vrl/action_graph.hpp"
#include "vrl/common.hpp"
#include "vrl/scene.hpp"

namespace vrl {

struct PhraseCountParams {
  int categories = 50;
  int attributes = 30;
  int predicates = 20;
  int attributes_per_category = 5;
  int partners_per_category = 4;     // object categories related to each subject
  int max_predicates_per_pair = 3;
  double below_threshold_fraction = 0.2;  // extra phrases with counts < min_count
  std::int64_t min_count = 30;
};

namespace detail {

inline std::string token(const char* prefix, int i, int width) {
  std::string n = std::to_string(i);
  return std::string(prefix) + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(n.size()))), '0') + n;
}

// Zipf weights 1/(rank+1)^s over a seeded permutation of [0, n).
inline std::vector<double> zipf_weights(std::size_t n, double s, Rng& rng) {
  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(rank[i] + 1), s);
  return w;
}

template <typename T, typename W>
const T& weighted_pick(const std::vector<T>& items, W&& weight, Rng& rng) {
  double total = 0.0;
  for (const auto& it : items) total += weight(it);
  double u = uniform01(rng) * total;
  for (const auto& it : items) {
    u -= weight(it);
    if (u <= 0.0) return it;
  }
  return items.back();
}

}  // namespace detail

// Phrase counts for a synthetic vocabulary of `categories` object words
// ("obj000"...), `attributes` attribute words and `predicates` predicate
// words. Every word appears in at least one retained phrase, so building
// with params.min_count yields exactly the requested node counts.
inline PhraseCounts synthetic_phrase_counts(const PhraseCountParams& p, std::uint64_t seed) {
  VRL_REQUIRE(p.categories >= 2 && p.attributes >= 1 && p.predicates >= 1,
              "synthetic vocabulary too small");
  Rng rng = make_stream(seed, "phrase-counts");
  auto cat = [](int i) { return detail::token("obj", i, 3); };
  auto att = [](int i) { return detail::token("attr", i, 3); };
  auto pre = [](int i) { return detail::token("pred", i, 3); };
  auto count_above = [&]() {
    // Heavy-tailed counts at or above the threshold.
    const double u = uniform01(rng);
    return p.min_count + static_cast<std::int64_t>(std::floor(std::pow(u, -1.5) * 5.0) - 5.0);
  };
  auto count_below = [&]() {
    return std::uniform_int_distribution<std::int64_t>(1, p.min_count - 1)(rng);
  };
  std::uniform_int_distribution<int> any_cat(0, p.categories - 1);
  std::uniform_int_distribution<int> any_att(0, p.attributes - 1);
  std::uniform_int_distribution<int> any_pre(0, p.predicates - 1);

  PhraseCounts out;
  std::set<std::pair<int, int>> attr_seen;
  std::set<std::tuple<int, int, int>> pred_seen;
  int next_attr = 0;
  for (int c = 0; c < p.categories; ++c) {
    const int want = std::min(p.attributes_per_category, p.attributes);
    for (int k = 0; k < want;) {
      // Round-robin first so every attribute word is used.
      const int a = next_attr < p.attributes ? next_attr++ : any_att(rng);
      if (attr_seen.emplace(c, a).second) {
        out.attribute_phrases.push_back({cat(c), att(a), count_above()});
        ++k;
      }
    }
  }
  int next_pred = 0;
  for (int c = 0; c < p.categories; ++c) {
    std::set<int> partners;
    while (static_cast<int>(partners.size()) < std::min(p.partners_per_category, p.categories - 1)) {
      int c2 = any_cat(rng);
      if (c2 != c) partners.insert(c2);
    }
    for (int c2 : partners) {
      const int k = std::uniform_int_distribution<int>(1, p.max_predicates_per_pair)(rng);
      for (int i = 0; i < k; ++i) {
        int pr = next_pred < p.predicates ? next_pred++ : any_pre(rng);
        if (pred_seen.emplace(c, pr, c2).second)
          out.predicate_phrases.push_back({cat(c), pre(pr), cat(c2), count_above()});
      }
    }
  }
  const auto extra = static_cast<std::size_t>(
      p.below_threshold_fraction *
      static_cast<double>(out.attribute_phrases.size() + out.predicate_phrases.size()));
  for (std::size_t i = 0; i < extra; ++i) {
    if (i % 2 == 0) {
      int c = any_cat(rng), a = any_att(rng);
      if (attr_seen.emplace(c, a).second) out.attribute_phrases.push_back({cat(c), att(a), count_below()});
    } else {
      int c = any_cat(rng), pr = any_pre(rng), c2 = any_cat(rng);
      if (c != c2 && pred_seen.emplace(c, pr, c2).second)
        out.predicate_phrases.push_back({cat(c), pre(pr), cat(c2), count_below()});
    }
  }
  return out;
}

class SyntheticWorld {
 public:
  SyntheticWorld(const SemanticGraph& g, std::uint64_t world_seed) : graph_(&g) {
    Rng rng = make_stream(world_seed, "world");
    category_weight_ = detail::zipf_weights(g.num_categories(), 0.6, rng);
    predicate_weight_ = detail::zipf_weights(g.num_predicates(), 1.2, rng);
    attribute_weight_ = detail::zipf_weights(g.num_attributes(), 1.0, rng);

    // Least popular ~20% of categories act as decoys.
    std::vector<std::size_t> by_pop(g.num_categories());
    std::iota(by_pop.begin(), by_pop.end(), 0);
    std::stable_sort(by_pop.begin(), by_pop.end(), [&](std::size_t a, std::size_t b) {
      return category_weight_[a] < category_weight_[b];
    });
    const std::size_t n_decoy = std::max<std::size_t>(2, g.num_categories() / 5);
    std::vector<std::size_t> pool(by_pop.begin(),
                                  by_pop.begin() + static_cast<std::ptrdiff_t>(std::min(n_decoy, by_pop.size())));
    decoy_.resize(g.num_categories());
    for (std::size_t c = 0; c < g.num_categories(); ++c) {
      std::size_t d = c;
      if (pool.size() > 1 || (pool.size() == 1 && pool[0] != c)) {
        while (d == c) d = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      }
      decoy_[c] = CategoryId(static_cast<std::int32_t>(d));
    }

    partners_.resize(g.num_categories());
    for (auto [c, c2] : g.related_pairs()) {
      partners_[c.index()].push_back({c2, true});
      partners_[c2.index()].push_back({c, false});
    }
  }

  const SemanticGraph& graph() const { return *graph_; }
  double category_weight(CategoryId c) const { return category_weight_[c.index()]; }
  double predicate_weight(PredicateId p) const { return predicate_weight_[p.index()]; }
  double attribute_weight(AttributeId a) const { return attribute_weight_[a.index()]; }
  CategoryId decoy(CategoryId c) const { return decoy_[c.index()]; }

  struct Partner {
    CategoryId other;
    bool outgoing;  // true: (this, p, other) edges exist; false: (other, p, this)
  };
  const std::vector<Partner>& partners(CategoryId c) const { return partners_[c.index()]; }

 private:
  const SemanticGraph* graph_;
  std::vector<double> category_weight_;
  std::vector<double> predicate_weight_;
  std::vector<double> attribute_weight_;
  std::vector<CategoryId> decoy_;
  std::vector<std::vector<Partner>> partners_;
};

struct SceneGenParams {
  int n_objects = 6;
  double noise = 0.05;      // box jitter, relative to box size
  double canvas = 10.0;     // square canvas side
  double confusion = 0.3;   // probability a detection scores its decoy above the truth
  double attach_prob = 0.85;
  double extra_relation_prob = 0.25;
  int max_attributes = 2;
  double min_size = 1.2;
  double max_size = 2.8;
  // Typed predicate phrases that must not appear in generated ground truth
  // (used to build zero-shot training sets). The graph edges stay intact.
  std::set<std::tuple<CategoryId, PredicateId, CategoryId>> excluded_pred_types;
};

// Deterministic in (world, seed, params, id).
inline Scene generate_synthetic_scene(const SyntheticWorld& world, std::uint64_t seed,
                                      const SceneGenParams& params, const std::string& id) {
  const SemanticGraph& g = world.graph();
  VRL_REQUIRE(g.num_categories() > 0, "graph is empty");
  VRL_REQUIRE(params.n_objects >= 1, "n_objects must be >= 1");
  if (g.related_pairs().empty()) throw GenerationError("graph has no predicate edges");

  Rng rng = make_stream(seed, "scene-gen");
  std::vector<CategoryId> all_cats(g.num_categories());
  for (std::size_t i = 0; i < all_cats.size(); ++i) all_cats[i] = CategoryId(static_cast<std::int32_t>(i));
  auto pick_category = [&] {
    return detail::weighted_pick(all_cats, [&](CategoryId c) { return world.category_weight(c); }, rng);
  };
  auto allowed_predicates = [&](CategoryId s, CategoryId o) {
    std::vector<PredicateId> out;
    for (PredicateId p : g.predicates_between(s, o))
      if (!params.excluded_pred_types.contains({s, p, o})) out.push_back(p);
    return out;
  };
  auto pick_predicate = [&](const std::vector<PredicateId>& ps) {
    return detail::weighted_pick(ps, [&](PredicateId p) { return world.predicate_weight(p); }, rng);
  };
  auto size = [&] { return params.min_size + uniform01(rng) * (params.max_size - params.min_size); };
  auto clampc = [&](double v, double half) {
    return std::clamp(v, half, std::max(half, params.canvas - half));
  };

  Scene scene;
  scene.id = id;
  scene.image_feature_key = id;
  auto& gt = scene.gt;

  for (int i = 0; i < params.n_objects; ++i) {
    GtObject obj;
    obj.box.w = size();
    obj.box.h = size();
    bool attached = false;
    if (i > 0 && uniform01(rng) < params.attach_prob) {
      const int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
      const GtObject& par = gt.objects[static_cast<std::size_t>(parent)];
      const auto& partners = world.partners(par.category);
      if (!partners.empty()) {
        const auto& pick = detail::weighted_pick(
            partners, [&](const SyntheticWorld::Partner& q) { return world.category_weight(q.other); }, rng);
        const CategoryId s = pick.outgoing ? par.category : pick.other;
        const CategoryId o = pick.outgoing ? pick.other : par.category;
        auto ps = allowed_predicates(s, o);
        if (!ps.empty()) {
          obj.category = pick.other;
          // Offset keeps the pair strictly inside the neighbor range.
          const double rx = 0.5 * (obj.box.w + par.box.w), ry = 0.5 * (obj.box.h + par.box.h);
          obj.box.cx = clampc(par.box.cx + (uniform01(rng) * 1.3 - 0.65) * rx, 0.5 * obj.box.w);
          obj.box.cy = clampc(par.box.cy + (uniform01(rng) * 1.3 - 0.65) * ry, 0.5 * obj.box.h);
          const PredicateId p = pick_predicate(ps);
          const int child = i;
          gt.pred_phrases.push_back(pick.outgoing ? GtPredicatePhrase{parent, p, child}
                                                  : GtPredicatePhrase{child, p, parent});
          attached = true;
        }
      }
    }
    if (!attached) {
      obj.category = pick_category();
      obj.box.cx = 0.5 * obj.box.w + uniform01(rng) * (params.canvas - obj.box.w);
      obj.box.cy = 0.5 * obj.box.h + uniform01(rng) * (params.canvas - obj.box.h);
    }
    gt.objects.push_back(obj);
  }

  // Extra relations between neighboring gt objects.
  const int n = static_cast<int>(gt.objects.size());
  auto gt_neighbors = [&](int a, int b) {
    const auto& A = gt.objects[static_cast<std::size_t>(a)].box;
    const auto& B = gt.objects[static_cast<std::size_t>(b)].box;
    return std::abs(A.cx - B.cx) < 0.5 * (A.w + B.w) && std::abs(A.cy - B.cy) < 0.5 * (A.h + B.h);
  };
  auto related = [&](int a, int b) {
    for (const auto& pp : gt.pred_phrases)
      if ((pp.subject == a && pp.object == b) || (pp.subject == b && pp.object == a)) return true;
    return false;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b || !gt_neighbors(a, b) || related(a, b)) continue;
      auto ps = allowed_predicates(gt.objects[static_cast<std::size_t>(a)].category,
                                   gt.objects[static_cast<std::size_t>(b)].category);
      if (ps.empty() || uniform01(rng) >= params.extra_relation_prob) continue;
      gt.pred_phrases.push_back({a, pick_predicate(ps), b});
    }
  }

  for (int i = 0; i < n; ++i) {
    auto attrs = g.attributes_of(gt.objects[static_cast<std::size_t>(i)].category);
    if (attrs.empty() || params.max_attributes < 1) continue;
    std::vector<AttributeId> pool(attrs.begin(), attrs.end());
    const int k = std::uniform_int_distribution<int>(1, params.max_attributes)(rng);
    for (int j = 0; j < k && !pool.empty(); ++j) {
      const AttributeId a = detail::weighted_pick(
          pool, [&](AttributeId x) { return world.attribute_weight(x); }, rng);
      gt.attr_phrases.push_back({i, a});
      pool.erase(std::find(pool.begin(), pool.end(), a));
    }
  }
  gt.normalize();

  std::normal_distribution<double> jitter(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const GtObject& obj = gt.objects[static_cast<std::size_t>(i)];
    ObjectInstance inst;
    inst.id = i;
    inst.box = obj.box;
    if (params.noise > 0.0) {
      inst.box.cx += jitter(rng) * params.noise * obj.box.w;
      inst.box.cy += jitter(rng) * params.noise * obj.box.h;
      inst.box.w *= std::exp(jitter(rng) * params.noise);
      inst.box.h *= std::exp(jitter(rng) * params.noise);
    }
    const double truth = 0.55 + 0.35 * uniform01(rng);
    const CategoryId decoy = world.decoy(obj.category);
    double decoy_score = 0.0;
    if (uniform01(rng) < params.confusion) {
      decoy_score = std::min(1.0, truth + 0.01 + 0.08 * uniform01(rng));
    } else {
      decoy_score = std::max(0.01, truth - 0.15 - 0.3 * uniform01(rng));
    }
    inst.category_scores.emplace_back(obj.category, truth);
    if (decoy != obj.category) inst.category_scores.emplace_back(decoy, decoy_score);
    std::sort(inst.category_scores.begin(), inst.category_scores.end());
    inst.objectness = 0.5 + 0.5 * uniform01(rng);
    scene.instances.push_back(std::move(inst));
  }
  return scene;
}

// `count` scenes named "<prefix>-000000"...; scene i uses seed
// splitmix64(seed + i).
inline std::vector<Scene> generate_scene_set(const SyntheticWorld& world, std::uint64_t seed,
                                             std::size_t count, const SceneGenParams& params,
                                             const std::string& prefix = "scene") {
  std::vector<Scene> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(generate_synthetic_scene(world, splitmix64(seed + i), params,
                                           detail::token((prefix + "-").c_str(), static_cast<int>(i), 6)));
  return out;
}

}  // namespace vrl
