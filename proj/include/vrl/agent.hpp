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

// Episode execution, the training loop and the policy variants compared in
// ablations.
//
// Episode protocol. The first subject is the most confident instance. Every
// time a subject starts, it has no bound object: that step's predicate action
// is forced to Null and the category head binds the first object (or emits
// Terminal). Each later step predicts an attribute of the subject, a
// predicate between subject and object, and the next object. Terminal
// advances the breadth-first scheduler; the episode ends when every instance
// has served as subject or after max_steps steps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "vrl/action_graph.hpp"
#include "vrl/eval.hpp"
#include "vrl/features.hpp"
#include "vrl/qnetwork.hpp"
#include "vrl/scene.hpp"
#include "vrl/traversal.hpp"

namespace vrl {

enum class PolicyVariant { kVrl, kFlatRl, kRandomWalk, kNoAmbiguity, kHistoricalActions };

inline std::string to_string(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::kVrl: return "vrl";
    case PolicyVariant::kFlatRl: return "flat-rl";
    case PolicyVariant::kRandomWalk: return "random-walk";
    case PolicyVariant::kNoAmbiguity: return "no-ambiguity";
    case PolicyVariant::kHistoricalActions: return "historical-actions";
  }
  return "?";
}

inline PolicyVariant parse_variant(std::string_view s) {
  for (auto v : {PolicyVariant::kVrl, PolicyVariant::kFlatRl, PolicyVariant::kRandomWalk,
                 PolicyVariant::kNoAmbiguity, PolicyVariant::kHistoricalActions})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown policy variant '" + std::string(s) + "'");
}

inline bool is_learned(PolicyVariant v) { return v != PolicyVariant::kRandomWalk; }

struct TrainConfig {
  int epochs = 60;
  double lr = 0.0007;
  int lr_decay_every = 10;
  double lr_decay_factor = 0.1;
  double eps_start = 1.0;
  double eps_end = 0.1;
  int eps_anneal_epochs = 20;
  double discount = 0.9;
  std::uint64_t target_sync = 10000;
  int batch = 64;
  std::size_t replay_capacity = 50000;
  int max_steps = 300;
  int neighbor_cap = kNeighborCap;
  double ambiguity_margin = kAmbiguityMargin;
  std::vector<int> hidden = {256, 256};
  bool separate_trunks = false;
  double rmsprop_decay = 0.95;
  double rmsprop_eps = 1e-6;
  int update_every = 1;  // environment steps per q_update

  nlohmann::json to_json() const {
    return {{"epochs", epochs},
            {"lr", lr},
            {"lr_decay_every", lr_decay_every},
            {"lr_decay_factor", lr_decay_factor},
            {"eps_start", eps_start},
            {"eps_end", eps_end},
            {"eps_anneal_epochs", eps_anneal_epochs},
            {"discount", discount},
            {"target_sync", target_sync},
            {"batch", batch},
            {"replay_capacity", replay_capacity},
            {"max_steps", max_steps},
            {"neighbor_cap", neighbor_cap},
            {"ambiguity_margin", ambiguity_margin},
            {"hidden", hidden},
            {"separate_trunks", separate_trunks},
            {"rmsprop_decay", rmsprop_decay},
            {"rmsprop_eps", rmsprop_eps},
            {"update_every", update_every}};
  }
  static TrainConfig from_json(const nlohmann::json& j) {
    TrainConfig c;
    auto get = [&](const char* k, auto& field) {
      if (j.contains(k)) j.at(k).get_to(field);
    };
    get("epochs", c.epochs);
    get("lr", c.lr);
    get("lr_decay_every", c.lr_decay_every);
    get("lr_decay_factor", c.lr_decay_factor);
    get("eps_start", c.eps_start);
    get("eps_end", c.eps_end);
    get("eps_anneal_epochs", c.eps_anneal_epochs);
    get("discount", c.discount);
    get("target_sync", c.target_sync);
    get("batch", c.batch);
    get("replay_capacity", c.replay_capacity);
    get("max_steps", c.max_steps);
    get("neighbor_cap", c.neighbor_cap);
    get("ambiguity_margin", c.ambiguity_margin);
    get("hidden", c.hidden);
    get("separate_trunks", c.separate_trunks);
    get("rmsprop_decay", c.rmsprop_decay);
    get("rmsprop_eps", c.rmsprop_eps);
    get("update_every", c.update_every);
    return c;
  }
};

// Linear from eps_start at epoch 0 to eps_end at eps_anneal_epochs, then flat.
inline double epsilon_at(const TrainConfig& c, int epoch) {
  if (c.eps_anneal_epochs <= 0 || epoch >= c.eps_anneal_epochs) return c.eps_end;
  const double frac = static_cast<double>(std::max(epoch, 0)) / c.eps_anneal_epochs;
  return c.eps_start + (c.eps_end - c.eps_start) * frac;
}

// lr * factor^floor(epoch / every).
inline double lr_at(const TrainConfig& c, int epoch) {
  if (c.lr_decay_every <= 0) return c.lr;
  return c.lr * std::pow(c.lr_decay_factor, epoch / c.lr_decay_every);
}

// Everything an episode needs besides the scene and the model.
struct AgentContext {
  const SemanticGraph* graph = nullptr;
  const FeatureProvider* features = nullptr;
  FeatureConfig feature_cfg;
  TrainConfig train_cfg;
  PolicyVariant variant = PolicyVariant::kVrl;

  std::size_t n_cat() const { return graph->num_categories(); }
  std::size_t n_attr() const { return graph->num_attributes(); }
  std::size_t n_pred() const { return graph->num_predicates(); }

  int state_dim() const {
    if (variant == PolicyVariant::kHistoricalActions)
      return feature_cfg.d_image + 2 * feature_cfg.d_instance +
             kActionHistoryLength * static_cast<int>(n_cat() + n_attr() + n_pred());
    return feature_cfg.state_dim();
  }

  QModelConfig model_config() const {
    QModelConfig m;
    m.state_dim = state_dim();
    m.hidden = train_cfg.hidden;
    m.separate_trunks = train_cfg.separate_trunks;
    m.head_sizes = {static_cast<int>(n_attr()) + 1, static_cast<int>(n_pred()) + 1,
                    static_cast<int>(n_cat()) + 1};
    return m;
  }

  void validate() const {
    VRL_REQUIRE(graph != nullptr && features != nullptr, "agent context is incomplete");
    VRL_REQUIRE(features->image_dim() == feature_cfg.d_image, "image feature dimension mismatch");
    VRL_REQUIRE(features->instance_dim() == feature_cfg.d_instance,
                "instance feature dimension mismatch");
  }
};

enum class EpisodeMode { kTrain, kEval };

using SlotSets = std::array<std::vector<int>, kNumHeads>;

struct StepRecord {
  int step = 0;
  int subject = 0;
  std::optional<int> object;
  std::array<int, kNumHeads> actions{};
  std::array<int, kNumHeads> rewards{};
  std::vector<std::string> emitted;  // phrases emitted at this step
  std::optional<SlotSets> sets;      // allowed slots, when recorded
};

struct EpisodeLog {
  std::vector<StepRecord> steps;
  std::vector<Prediction> predictions;
  double total_reward = 0.0;
};

struct EpisodeResult {
  std::vector<Transition> transitions;
  EpisodeLog log;
};

struct EpisodeOptions {
  EpisodeMode mode = EpisodeMode::kEval;
  double epsilon = 0.0;
  bool record_sets = false;
  // When set, transitions are handed over as soon as they are complete
  // instead of being collected in the result.
  std::function<void(Transition&&)> on_transition;
};

namespace detail {

// The instance a FlatRL category action selects: the unvisited instance
// (other than the subject) scoring highest for c; ties go to the lowest id.
inline std::optional<int> flat_resolve(const Scene& scene, CategoryId c, const TraversalHistory& hist,
                                       int subject) {
  std::optional<int> best;
  double best_score = -1.0;
  for (const auto& t : scene.instances) {
    if (t.id == subject || hist.visited(t.id)) continue;
    const double sc = t.score(c);
    if (!best || sc > best_score || (sc == best_score && t.id < *best)) {
      best = t.id;
      best_score = sc;
    }
  }
  return best;
}

inline PredictedInstance predicted(const ObjectInstance& inst, CategoryId c) {
  return {inst.id, c, inst.box, inst.objectness};
}

}  // namespace detail

// Runs one episode of a learned variant. Action selection is epsilon-greedy
// over the variant's allowed slots.
inline EpisodeResult run_episode(const Scene& scene, const AgentContext& ctx, const QModel& model,
                                 const EpisodeOptions& opts, Rng& rng) {
  VRL_REQUIRE(is_learned(ctx.variant), "run_episode needs a learned policy variant");
  const auto& g = *ctx.graph;
  const auto& cfg = ctx.train_cfg;
  VRL_REQUIRE(model.config().head_sizes == ctx.model_config().head_sizes,
              "model head sizes do not match the graph");
  VRL_REQUIRE(model.config().state_dim == ctx.state_dim(), "model state dimension mismatch");
  EpisodeResult res;
  if (scene.instances.empty()) return res;

  const int null_attr = static_cast<int>(ctx.n_attr());
  const int null_pred = static_cast<int>(ctx.n_pred());
  const int terminal = static_cast<int>(ctx.n_cat());
  const bool flat = ctx.variant == PolicyVariant::kFlatRl;
  const bool top1 = ctx.variant == PolicyVariant::kNoAmbiguity;
  const bool action_state = ctx.variant == PolicyVariant::kHistoricalActions;
  const bool want_transitions = opts.mode == EpisodeMode::kTrain;

  const Vector image = ctx.features->image_feature(scene);
  std::unordered_map<int, Vector> inst_feat;
  auto instance_feature = [&](int id) -> const Vector& {
    auto it = inst_feat.find(id);
    if (it == inst_feat.end())
      it = inst_feat.emplace(id, ctx.features->instance_feature(scene, scene.instance(id))).first;
    return it->second;
  };
  const Vector zero_obj = Vector::Zero(ctx.feature_cfg.d_instance);

  TraversalHistory hist;
  SubjectScheduler sched;
  HistoryBuffer phrases;
  std::deque<ActionRecord> recent;
  std::map<int, CategoryId> assigned;
  std::set<int> discovered;
  std::optional<int> subject = advance_subject(sched, scene, hist);
  assigned.emplace(*subject, scene.instance(*subject).top_category());
  std::optional<int> object;

  auto state = [&]() -> Vector {
    const Vector& s = instance_feature(*subject);
    const Vector& o = object ? instance_feature(*object) : zero_obj;
    if (action_state)
      return concat_state(image, s, o, action_history_block(recent, ctx.n_cat(), ctx.n_attr(), ctx.n_pred()));
    return assemble_state(image, s, o, phrases, ctx.feature_cfg);
  };

  // Allowed slots plus the variation-structured category set they came from.
  std::vector<CategoryAction> delta_c;
  auto action_slots = [&]() -> SlotSets {
    SlotSets sl;
    const ObjectInstance& s = scene.instance(*subject);
    const CategoryId s_cat = assigned.at(*subject);
    const bool capped = neighbor_cap_reached(sched, cfg.neighbor_cap);
    if (flat) {
      // The whole vocabulary; Null stands for an empty set, so it is offered
      // only for the predicate head while no object is bound.
      for (int a = 0; a < null_attr; ++a) sl[0].push_back(a);
      if (sl[0].empty()) sl[0].push_back(null_attr);
      if (object && null_pred > 0) {
        for (int p = 0; p < null_pred; ++p) sl[1].push_back(p);
      } else {
        sl[1].push_back(null_pred);
      }
      const bool any_unvisited = detail::flat_resolve(scene, CategoryId(0), hist, *subject).has_value();
      if (!capped && any_unvisited)
        for (int c = 0; c < terminal; ++c) sl[2].push_back(c);
      sl[2].push_back(terminal);
      return sl;
    }
    for (const auto& a : build_attribute_actions(g, s_cat, hist, *subject))
      sl[0].push_back(a ? a->value : null_attr);
    if (object) {
      for (const auto& p : build_predicate_actions(g, s_cat, assigned.at(*object)))
        sl[1].push_back(p ? p->value : null_pred);
    } else {
      sl[1].push_back(null_pred);
    }
    if (capped) {
      delta_c.assign(1, std::nullopt);
    } else {
      delta_c = build_category_actions(scene, s, hist, cfg.ambiguity_margin, top1);
    }
    std::set<int> cats;
    for (const auto& act : delta_c)
      if (act) cats.insert(act->category.value);
    sl[2].assign(cats.begin(), cats.end());
    sl[2].push_back(terminal);
    return sl;
  };

  std::optional<Transition> pending;
  auto emit = [&](Transition&& t) {
    if (opts.on_transition) {
      opts.on_transition(std::move(t));
    } else {
      res.transitions.push_back(std::move(t));
    }
  };

  bool done = false;
  for (int step = 0; step < cfg.max_steps && !done; ++step) {
    const Vector f = state();
    const SlotSets sl = action_slots();
    if (pending) {
      pending->next_state = to_floats(f);
      pending->next_actions = sl;
      emit(std::move(*pending));
      pending.reset();
    }
    const QValues q = forward(model, f);
    const auto act = select_actions(q, sl, opts.epsilon, rng);

    const ObjectInstance& s = scene.instance(*subject);
    const CategoryId s_cat = assigned.at(*subject);
    StepRecord rec;
    rec.step = step;
    rec.subject = *subject;
    rec.object = object;
    rec.actions = act;
    if (opts.record_sets) rec.sets = sl;

    const std::optional<AttributeId> g_a =
        act[0] < null_attr ? std::optional<AttributeId>(AttributeId(act[0])) : std::nullopt;
    const std::optional<PredicateId> g_p =
        act[1] < null_pred ? std::optional<PredicateId>(PredicateId(act[1])) : std::nullopt;
    std::optional<ObjectAction> g_c;
    if (act[2] < terminal) {
      const CategoryId c(act[2]);
      const int inst = flat ? *detail::flat_resolve(scene, c, hist, *subject)
                            : resolve_category_action(scene, c, delta_c);
      g_c = ObjectAction{c, inst};
    }

    rec.rewards[0] = reward_attribute(scene, s, s_cat, g_a);
    rec.rewards[1] = 0;
    if (object && g_p) {
      const ObjectInstance& o = scene.instance(*object);
      rec.rewards[1] = reward_predicate(scene, s, s_cat, o, assigned.at(*object), g_p);
    }
    rec.rewards[2] = reward_category(scene, g_c, discovered);
    if (g_c)
      for (int gi : matching_gt(scene, scene.instance(g_c->instance), g_c->category)) discovered.insert(gi);

    if (g_a) {
      hist.mined_attrs[*subject].insert(*g_a);
      Prediction p;
      p.kind = PredictionKind::kAttribute;
      p.subject = detail::predicted(s, s_cat);
      p.label = g_a->value;
      p.q_value = q[0][act[0]];
      res.log.predictions.push_back(p);
      const std::string phrase = g.name(s_cat) + " " + g.name(*g_a);
      rec.emitted.push_back(phrase);
      phrases = update_history(std::move(phrases), phrase, PhraseKind::kAttribute);
    }
    if (object && g_p) {
      const ObjectInstance& o = scene.instance(*object);
      const CategoryId o_cat = assigned.at(*object);
      const std::string phrase = g.name(s_cat) + " " + g.name(*g_p) + " " + g.name(o_cat);
      if (hist.emitted_pred_triples.emplace(*subject, *g_p, *object).second) {
        Prediction p;
        p.kind = PredictionKind::kRelationship;
        p.subject = detail::predicted(s, s_cat);
        p.object = detail::predicted(o, o_cat);
        p.label = g_p->value;
        p.q_value = q[1][act[1]];
        res.log.predictions.push_back(p);
        rec.emitted.push_back(phrase);
      }
      phrases = update_history(std::move(phrases), phrase, PhraseKind::kRelationship);
    }
    recent.push_front(ActionRecord{g_c ? std::optional<CategoryId>(g_c->category) : std::nullopt, g_a, g_p});
    if (recent.size() > static_cast<std::size_t>(kActionHistoryLength)) recent.pop_back();
    res.log.total_reward += rec.rewards[0] + rec.rewards[1] + rec.rewards[2];

    std::optional<Transition> t;
    if (want_transitions) {
      t.emplace();
      t->state = to_floats(f);
      t->actions = act;
      for (int h = 0; h < kNumHeads; ++h) t->rewards[static_cast<std::size_t>(h)] = rec.rewards[static_cast<std::size_t>(h)];
    }

    if (g_c) {
      assigned[g_c->instance] = g_c->category;
      record_object_selection(sched, hist, g_c->instance, cfg.neighbor_cap);
      object = g_c->instance;
    } else {
      object.reset();
      subject = advance_subject(sched, scene, hist);
      if (!subject) {
        done = true;
      } else if (!assigned.contains(*subject)) {
        assigned.emplace(*subject, scene.instance(*subject).top_category());
      }
    }
    res.log.steps.push_back(std::move(rec));

    if (t) {
      if (done) {
        t->terminal = true;
        t->next_state = t->state;
        emit(std::move(*t));
      } else {
        pending = std::move(t);
      }
    }
  }
  // Truncated by max_steps: bootstrap from the state the agent stopped in.
  if (pending) {
    pending->next_state = to_floats(state());
    pending->next_actions = action_slots();
    emit(std::move(*pending));
  }
  return res;
}

// Baseline without learning: visits the instances in a uniformly random
// order and, for each consecutive pair, predicts a uniformly random
// predicate from Δp and attribute of the first instance from Δa, using top-1
// categories.
inline EpisodeLog random_walk_episode(const Scene& scene, const SemanticGraph& g, Rng& rng,
                                      int max_steps = 300) {
  EpisodeLog log;
  if (scene.instances.empty()) return log;
  std::vector<int> order;
  for (const auto& inst : scene.instances) order.push_back(inst.id);
  std::shuffle(order.begin(), order.end(), rng);
  TraversalHistory hist;
  auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  for (std::size_t i = 0; i + 1 < order.size() && static_cast<int>(i) < max_steps; ++i) {
    const ObjectInstance& s = scene.instance(order[i]);
    const ObjectInstance& o = scene.instance(order[i + 1]);
    const CategoryId s_cat = s.top_category();
    const CategoryId o_cat = o.top_category();
    StepRecord rec;
    rec.step = static_cast<int>(i);
    rec.subject = s.id;
    rec.object = o.id;
    if (const AttributeAction a = pick(build_attribute_actions(g, s_cat, hist, s.id))) {
      hist.mined_attrs[s.id].insert(*a);
      Prediction p;
      p.kind = PredictionKind::kAttribute;
      p.subject = detail::predicted(s, s_cat);
      p.label = a->value;
      log.predictions.push_back(p);
      rec.emitted.push_back(g.name(s_cat) + " " + g.name(*a));
    }
    if (const PredicateAction pr = pick(build_predicate_actions(g, s_cat, o_cat))) {
      Prediction p;
      p.kind = PredictionKind::kRelationship;
      p.subject = detail::predicted(s, s_cat);
      p.object = detail::predicted(o, o_cat);
      p.label = pr->value;
      log.predictions.push_back(p);
      rec.emitted.push_back(g.name(s_cat) + " " + g.name(*pr) + " " + g.name(o_cat));
    }
    log.steps.push_back(std::move(rec));
  }
  return log;
}

// Per-scene RNG for evaluation episodes, independent of scene order.
inline Rng scene_stream(std::uint64_t seed, std::size_t index) {
  return make_stream(splitmix64(seed + index), "eval");
}

// Ranked predictions for every scene under the greedy policy (or a random
// walk). Scenes are split across `jobs` threads; results do not depend on it.
inline std::vector<std::vector<Prediction>> predict_scenes(const std::vector<Scene>& scenes,
                                                           const AgentContext& ctx, const QModel* model,
                                                           std::uint64_t seed, int jobs = 1) {
  std::vector<std::vector<Prediction>> out(scenes.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < scenes.size(); i += stride) {
      Rng rng = scene_stream(seed, i);
      if (ctx.variant == PolicyVariant::kRandomWalk) {
        out[i] = rank_predictions(
            random_walk_episode(scenes[i], *ctx.graph, rng, ctx.train_cfg.max_steps).predictions);
      } else {
        EpisodeOptions opts;
        out[i] = rank_predictions(run_episode(scenes[i], ctx, *model, opts, rng).log.predictions);
      }
    }
  };
  const std::size_t n = static_cast<std::size_t>(std::max(1, jobs));
  if (n == 1 || scenes.size() < 2) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < n; ++j) pool.emplace_back(work, j, n);
  for (auto& t : pool) t.join();
  return out;
}

struct EpochMetrics {
  int epoch = 0;
  double mean_reward = 0.0;
  double recall50_rel = 0.0;
  double recall50_attr = 0.0;
  double epsilon = 0.0;
  double lr = 0.0;
};

inline std::string timeline_csv(const std::vector<EpochMetrics>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "epoch,mean_reward,recall@50_rel,recall@50_attr,epsilon,alpha\n";
  for (const auto& r : rows)
    os << r.epoch << ',' << r.mean_reward << ',' << r.recall50_rel << ',' << r.recall50_attr << ','
       << r.epsilon << ',' << r.lr << '\n';
  return os.str();
}

// Observation hook called after every environment step of training.
struct TrainProbe {
  std::uint64_t step = 0;
  int epoch = 0;
  const QModel* online = nullptr;
  const QModel* target = nullptr;
  bool synced = false;
};

struct TrainResult {
  QModel model;
  Optimizer optimizer;
  std::uint64_t steps = 0;
  std::vector<EpochMetrics> timeline;
};

// Deep Q-learning over the training scenes. Every epoch runs one episode per
// scene in a seed-determined shuffled order; each environment step pushes its
// transition to replay and, once replay holds a full batch, performs a
// q_update every `update_every` steps. The target network is refreshed when
// the global step count is a multiple of target_sync.
inline TrainResult train(const std::vector<Scene>& scenes, const std::vector<Scene>& validation,
                         const AgentContext& ctx, std::uint64_t seed,
                         const std::function<void(const TrainProbe&)>& probe = {}) {
  VRL_REQUIRE(!scenes.empty(), "training needs at least one scene");
  VRL_REQUIRE(is_learned(ctx.variant), "random walk has nothing to train");
  ctx.validate();
  const TrainConfig& cfg = ctx.train_cfg;
  VRL_REQUIRE(cfg.batch >= 1 && cfg.update_every >= 1, "batch and update_every must be >= 1");

  Rng init_rng = make_stream(seed, "init");
  Rng eps_rng = make_stream(seed, "epsilon");
  Rng shuffle_rng = make_stream(seed, "shuffle");
  Rng replay_rng = make_stream(seed, "replay");

  TrainResult out;
  out.model = QModel::initialized(ctx.model_config(), init_rng);
  out.optimizer = Optimizer(OptimizerKind::kRmsProp, cfg.rmsprop_decay, cfg.rmsprop_eps);
  QModel target = out.model;
  ReplayMemory replay(cfg.replay_capacity);
  const auto batch_size = static_cast<std::size_t>(cfg.batch);

  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double eps = epsilon_at(cfg, epoch);
    const double lr = lr_at(cfg, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpisodeOptions opts;
    opts.mode = EpisodeMode::kTrain;
    opts.epsilon = eps;
    opts.on_transition = [&](Transition&& t) {
      replay.push(std::move(t));
      ++out.steps;
      if (replay.size() >= batch_size && out.steps % static_cast<std::uint64_t>(cfg.update_every) == 0) {
        const auto batch = replay.sample(batch_size, replay_rng);
        q_update(out.model, target, batch, cfg.discount, lr, out.optimizer);
      }
      const bool synced = sync_target(out.model, target, out.steps, cfg.target_sync);
      if (probe) probe(TrainProbe{out.steps, epoch, &out.model, &target, synced});
    };
    double reward = 0.0;
    for (std::size_t idx : order) reward += run_episode(scenes[idx], ctx, out.model, opts, eps_rng).log.total_reward;

    EpochMetrics m;
    m.epoch = epoch;
    m.mean_reward = reward / static_cast<double>(scenes.size());
    m.epsilon = eps;
    m.lr = lr;
    if (!validation.empty()) {
      const auto ranked = predict_scenes(validation, ctx, &out.model, seed);
      const RecallSummary s = summarize_recall(validation, ranked);
      m.recall50_rel = s.at(Task::kRelationship, 50);
      m.recall50_attr = s.at(Task::kAttribute, 50);
    }
    out.timeline.push_back(m);
  }
  return out;
}

}  // namespace vrl
