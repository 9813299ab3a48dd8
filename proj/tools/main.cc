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

// vrl: build semantic action graphs, synthesize scenes, train and evaluate
// relationship-mining agents, and compare policy variants.
//
// Exit codes: 0 success, 1 unreadable or invalid input file, 2 usage error.
// Every flag with an environment override reads VRL_<FLAG> (upper case,
// dashes as underscores), e.g. VRL_SEED or VRL_JOBS.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vrl/vrl.hpp"

namespace vrl::cli {
namespace {

namespace fs = std::filesystem;

// Raised for semantically invalid flag combinations detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_file_atomic(path, text);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json types_to_json(const SemanticGraph& g, const std::set<PredicateType>& types) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : types)
    arr.push_back({g.name(std::get<0>(t)), g.name(std::get<1>(t)), g.name(std::get<2>(t))});
  return arr;
}

std::set<PredicateType> types_from_json(const SemanticGraph& g, const std::string& path) {
  std::set<PredicateType> out;
  try {
    for (const auto& t : nlohmann::json::parse(read_file(path))) {
      out.emplace(g.category(t.at(0).get<std::string>()), g.predicate(t.at(1).get<std::string>()),
                  g.category(t.at(2).get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(path + ": " + e.what());
  } catch (const LookupError& e) {
    throw IngestError(path + ": " + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------

struct GenCountsArgs {
  std::string out;
  std::uint64_t seed = 1;
  PhraseCountParams params;
};

int gen_counts(const GenCountsArgs& a) {
  std::ostringstream os;
  write_phrase_counts(os, synthetic_phrase_counts(a.params, a.seed));
  write_text(a.out, os.str());
  return 0;
}

struct BuildGraphArgs {
  std::string counts;
  std::int64_t min_count = 30;
  std::string out;
};

int build_graph_cmd(const BuildGraphArgs& a) {
  const SemanticGraph g = build_graph(read_phrase_counts(a.counts), a.min_count);
  save_graph(g, a.out);
  const GraphStats s = g.stats();
  std::cout << dump({{"categories", s.categories},
                     {"attributes", s.attributes},
                     {"predicates", s.predicates},
                     {"attribute_edges", s.attribute_edges},
                     {"predicate_edges", s.predicate_edges},
                     {"hash", hex64(g.content_hash())}});
  return 0;
}

struct GenScenesArgs {
  std::string graph;
  std::string out;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::uint64_t world_seed = 0;
  std::string prefix = "scene";
  SceneGenParams params;
  std::string exclude_types;
  double holdout_fraction = 0.0;
  std::string holdout_out;
};

int gen_scenes(GenScenesArgs a) {
  const SemanticGraph g = load_graph(a.graph);
  if (!a.exclude_types.empty()) a.params.excluded_pred_types = types_from_json(g, a.exclude_types);
  if (a.holdout_fraction > 0.0) {
    const auto held = pick_holdout_types(g, a.holdout_fraction, a.seed);
    a.params.excluded_pred_types.insert(held.begin(), held.end());
    if (!a.holdout_out.empty()) write_text(a.holdout_out, dump(types_to_json(g, held)));
  }
  const SyntheticWorld world(g, a.world_seed);
  save_scenes(generate_scene_set(world, a.seed, a.count, a.params, a.prefix), g, a.out);
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string variant;
  std::optional<int> epochs;
};

int train_cmd(const TrainArgs& a) {
  RunConfig cfg = RunConfig::load(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (!a.out.empty()) cfg.out = a.out;
  if (!a.variant.empty()) cfg.variant = parse_variant(a.variant);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (cfg.graph.empty() || cfg.train_scenes.empty() || cfg.out.empty())
    throw IngestError(a.config + ": config needs graph, train_scenes and out");
  if (!is_learned(cfg.variant)) throw UsageError("variant '" + to_string(cfg.variant) + "' is not trainable");

  const SemanticGraph g = load_graph(cfg.graph);
  const auto scenes = load_scenes(cfg.train_scenes, g);
  const auto validation =
      cfg.validation_scenes.empty() ? std::vector<Scene>{} : load_scenes(cfg.validation_scenes, g);
  const auto features = cfg.features.make(g.num_categories());

  AgentContext ctx;
  ctx.graph = &g;
  ctx.features = features.get();
  ctx.feature_cfg = cfg.features.cfg;
  ctx.train_cfg = cfg.train;
  ctx.variant = cfg.variant;
  TrainResult tr = train(scenes, validation, ctx, cfg.seed);

  RunManifest m;
  m.config_path = fs::absolute(a.config).lexically_normal().string();
  m.seed = cfg.seed;
  m.graph_path = fs::absolute(cfg.graph).lexically_normal().string();
  m.scenes_path = fs::absolute(cfg.train_scenes).lexically_normal().string();
  m.graph_hash = g.content_hash();
  m.scene_hash = scene_set_hash(scenes, g);
  m.variant = cfg.variant;
  m.out_dir = cfg.out;

  Checkpoint ck;
  ck.header = {{"run", cfg.to_json()}, {"manifest", m.to_json()}};
  ck.model = std::move(tr.model);
  ck.optimizer = std::move(tr.optimizer);
  ck.step = tr.steps;
  fs::create_directories(cfg.out);
  save_checkpoint(ck, (fs::path(cfg.out) / "model.ckpt").string());
  write_text((fs::path(cfg.out) / "timeline.csv").string(), timeline_csv(tr.timeline));
  write_text((fs::path(cfg.out) / "manifest.json").string(), dump(m.to_json()));
  std::cerr << "trained " << to_string(cfg.variant) << " for " << cfg.train.epochs << " epochs (" << tr.steps
            << " steps) -> " << cfg.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string run;
  std::string graph;
  std::string scenes;
  std::string train_scenes;
  std::string config;
  std::string variant;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out;
  std::string csv;
};

std::string metrics_csv(const RecallSummary& s, bool with_zero_shot) {
  std::ostringstream os;
  os.precision(10);
  os << "task,recall@50,recall@100\n";
  for (Task t : {Task::kPhrase, Task::kRelationship, Task::kAttribute})
    os << task_name(t) << ',' << s.at(t, 50) << ',' << s.at(t, 100) << '\n';
  if (with_zero_shot) {
    os << "zero_shot_phrase," << s.zero_shot[0][0] << ',' << s.zero_shot[0][1] << '\n';
    os << "zero_shot_relationship," << s.zero_shot[1][0] << ',' << s.zero_shot[1][1] << '\n';
  }
  return os.str();
}

int evaluate_cmd(const EvaluateArgs& a) {
  RunConfig cfg;
  std::optional<Checkpoint> ck;
  std::string graph_path = a.graph;
  std::string train_path = a.train_scenes;
  if (!a.run.empty()) {
    const fs::path dir(a.run);
    const RunManifest m = RunManifest::load((dir / "manifest.json").string());
    ck = load_checkpoint((dir / "model.ckpt").string());
    cfg = RunConfig::from_json(ck->header.at("run"));
    if (graph_path.empty()) graph_path = m.graph_path;
    if (train_path.empty()) train_path = m.scenes_path;
    const SemanticGraph g = load_graph(m.graph_path);
    m.verify(g, load_scenes(m.scenes_path, g));
  } else {
    if (!a.config.empty()) cfg = RunConfig::load(a.config);
    cfg.variant = PolicyVariant::kRandomWalk;
    if (!a.variant.empty()) cfg.variant = parse_variant(a.variant);
    if (is_learned(cfg.variant)) throw UsageError("evaluating a learned variant needs --run");
    if (graph_path.empty()) throw UsageError("--graph is required without --run");
  }
  if (a.seed) cfg.seed = *a.seed;

  const SemanticGraph g = load_graph(graph_path);
  const auto test = load_scenes(a.scenes, g);
  const auto features = cfg.features.make(g.num_categories());
  AgentContext ctx;
  ctx.graph = &g;
  ctx.features = features.get();
  ctx.feature_cfg = cfg.features.cfg;
  ctx.train_cfg = cfg.train;
  ctx.variant = cfg.variant;
  if (ck) {
    if (ck->model.config() != ctx.model_config()) throw IngestError(a.run + ": model does not match the graph");
    ctx.validate();
  }

  std::optional<ZeroShotSplit> zs;
  if (!train_path.empty()) zs = zero_shot_split(load_scenes(train_path, g), test);
  const auto ranked = predict_scenes(test, ctx, ck ? &ck->model : nullptr, cfg.seed, a.jobs);
  const RecallSummary s = summarize_recall(test, ranked, zs ? &zs->unseen_types : nullptr);
  nlohmann::json report = recall_report(s, zs.has_value());
  report["variant"] = to_string(cfg.variant);
  report["seed"] = cfg.seed;
  if (zs) report["zero_shot_types"] = zs->unseen_types.size();
  write_text(a.out, dump(report));
  if (!a.csv.empty()) write_text(a.csv, metrics_csv(s, zs.has_value()));
  return 0;
}

// ---------------------------------------------------------------------------

struct AblateArgs {
  std::string graph;
  std::string scenes;
  std::string train_scenes;
  std::string config;
  int seeds = 5;
  std::uint64_t seed_base = 1;
  std::vector<std::string> variants{"vrl", "flat-rl", "random-walk", "no-ambiguity"};
  std::optional<int> epochs;
  double train_fraction = 0.8;
  int jobs = 1;
  std::string out;
  std::string summary;
};

int ablate_cmd(const AblateArgs& a) {
  RunConfig cfg;
  if (!a.config.empty()) cfg = RunConfig::load(a.config);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.seeds < 1) throw UsageError("--seeds must be >= 1");
  std::vector<PolicyVariant> variants;
  for (const auto& v : a.variants) variants.push_back(parse_variant(v));

  const SemanticGraph g = load_graph(a.graph);
  auto scenes = load_scenes(a.scenes, g);
  std::vector<Scene> train_set, test;
  if (!a.train_scenes.empty()) {
    train_set = load_scenes(a.train_scenes, g);
    test = std::move(scenes);
  } else {
    const auto n_train = static_cast<std::size_t>(a.train_fraction * static_cast<double>(scenes.size()));
    if (n_train == 0 || n_train >= scenes.size())
      throw UsageError("--train-fraction leaves an empty training or test split");
    train_set.assign(scenes.begin(), scenes.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.assign(scenes.begin() + static_cast<std::ptrdiff_t>(n_train), scenes.end());
  }
  const ZeroShotSplit zs = zero_shot_split(train_set, test);
  const auto features = cfg.features.make(g.num_categories());
  AgentContext ctx;
  ctx.graph = &g;
  ctx.features = features.get();
  ctx.feature_cfg = cfg.features.cfg;
  ctx.train_cfg = cfg.train;

  std::vector<VariantResult> rows;
  for (PolicyVariant v : variants)
    for (int i = 0; i < a.seeds; ++i) {
      const std::uint64_t seed = a.seed_base + static_cast<std::uint64_t>(i);
      rows.push_back(run_variant(train_set, {}, test, ctx, v, seed, a.jobs, &zs.unseen_types));
      std::cerr << to_string(v) << " seed " << seed << ": relationship@50 "
                << rows.back().summary.at(Task::kRelationship, 50) << "\n";
    }
  write_text(a.out, ablation_csv(rows, true));

  nlohmann::json med = nlohmann::json::object();
  for (PolicyVariant v : variants) {
    nlohmann::json row;
    for (Task t : {Task::kPhrase, Task::kRelationship, Task::kAttribute}) {
      std::vector<double> r50, r100;
      for (const auto& r : rows)
        if (r.variant == v) {
          r50.push_back(r.summary.at(t, 50));
          r100.push_back(r.summary.at(t, 100));
        }
      row[task_name(t)] = {{"recall@50", median(r50)}, {"recall@100", median(r100)}};
    }
    med[to_string(v)] = row;
  }
  if (!a.summary.empty()) write_text(a.summary, dump({{"median_over_seeds", med}, {"seeds", a.seeds}}));
  return 0;
}

// ---------------------------------------------------------------------------

struct InspectArgs {
  std::string graph;
  std::string scenes;
  std::size_t index = 0;
  std::string model;
  std::string variant = "random-walk";
  std::uint64_t seed = 1;
};

nlohmann::json decode_sets(const SemanticGraph& g, const SlotSets& sl) {
  nlohmann::json a = nlohmann::json::array(), p = nlohmann::json::array(), c = nlohmann::json::array();
  for (int x : sl[0])
    a.push_back(static_cast<std::size_t>(x) < g.num_attributes() ? g.name(AttributeId(x)) : "<null>");
  for (int x : sl[1])
    p.push_back(static_cast<std::size_t>(x) < g.num_predicates() ? g.name(PredicateId(x)) : "<null>");
  for (int x : sl[2])
    c.push_back(static_cast<std::size_t>(x) < g.num_categories() ? g.name(CategoryId(x)) : "<terminal>");
  return {{"attribute", a}, {"predicate", p}, {"category", c}};
}

int inspect_cmd(const InspectArgs& a) {
  const SemanticGraph g = load_graph(a.graph);
  const GraphStats st = g.stats();
  nlohmann::json out = {{"graph",
                         {{"categories", st.categories},
                          {"attributes", st.attributes},
                          {"predicates", st.predicates},
                          {"attribute_edges", st.attribute_edges},
                          {"predicate_edges", st.predicate_edges},
                          {"hash", hex64(g.content_hash())}}}};
  if (a.scenes.empty()) {
    std::cout << dump(out);
    return 0;
  }
  const auto scenes = load_scenes(a.scenes, g);
  if (a.index >= scenes.size()) throw UsageError("--index is past the last scene");
  const Scene& scene = scenes[a.index];
  out["scene"] = scene_to_json(scene, g);

  RunConfig cfg;
  std::optional<Checkpoint> ck;
  if (!a.model.empty()) {
    ck = load_checkpoint(a.model);
    cfg = RunConfig::from_json(ck->header.at("run"));
  } else {
    cfg.variant = parse_variant(a.variant);
    if (is_learned(cfg.variant)) throw UsageError("tracing a learned variant needs --model");
  }
  const auto features = cfg.features.make(g.num_categories());
  AgentContext ctx;
  ctx.graph = &g;
  ctx.features = features.get();
  ctx.feature_cfg = cfg.features.cfg;
  ctx.train_cfg = cfg.train;
  ctx.variant = cfg.variant;

  Rng rng = scene_stream(a.seed, a.index);
  EpisodeLog log;
  if (ck) {
    EpisodeOptions opts;
    opts.record_sets = true;
    log = run_episode(scene, ctx, ck->model, opts, rng).log;
  } else {
    log = random_walk_episode(scene, g, rng, cfg.train.max_steps);
  }
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : log.steps) {
    nlohmann::json j = {{"step", s.step},
                        {"subject", s.subject},
                        {"actions", s.actions},
                        {"rewards", s.rewards},
                        {"emitted", s.emitted}};
    j["object"] = s.object ? nlohmann::json(*s.object) : nlohmann::json(nullptr);
    if (s.sets) j["sets"] = decode_sets(g, *s.sets);
    steps.push_back(std::move(j));
  }
  out["trace"] = {{"variant", to_string(cfg.variant)},
                  {"steps", steps},
                  {"total_reward", log.total_reward},
                  {"predictions", log.predictions.size()}};
  std::cout << dump(out);
  return 0;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"Visual relationship and attribute mining with deep variation-structured Q-learning"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  GenCountsArgs gc;
  auto* c_gc = app.add_subcommand("gen-counts", "Write a synthetic phrase-count table (TSV)");
  c_gc->add_option("--out", gc.out, "Output TSV path")->required();
  c_gc->add_option("--seed", gc.seed, "Random seed")->envname("VRL_SEED");
  c_gc->add_option("--categories", gc.params.categories, "Number of categories")->capture_default_str();
  c_gc->add_option("--attributes", gc.params.attributes, "Number of attributes")->capture_default_str();
  c_gc->add_option("--predicates", gc.params.predicates, "Number of predicates")->capture_default_str();
  c_gc->add_option("--min-count", gc.params.min_count, "Count threshold the table is designed around")
      ->capture_default_str();

  BuildGraphArgs bg;
  auto* c_bg = app.add_subcommand("build-graph", "Build the semantic action graph from phrase counts");
  c_bg->add_option("--counts", bg.counts, "Phrase-count TSV")->required();
  c_bg->add_option("--min-count", bg.min_count, "Keep phrases with count >= this")->capture_default_str();
  c_bg->add_option("--out", bg.out, "Output graph file")->required();

  GenScenesArgs gs;
  auto* c_gs = app.add_subcommand("gen-scenes", "Generate a synthetic scene set (JSON lines)");
  c_gs->add_option("--graph", gs.graph, "Graph file")->required();
  c_gs->add_option("--out", gs.out, "Output scene file")->required();
  c_gs->add_option("--count", gs.count, "Number of scenes")->capture_default_str();
  c_gs->add_option("--seed", gs.seed, "Scene-generation seed")->envname("VRL_SEED")->capture_default_str();
  c_gs->add_option("--world-seed", gs.world_seed, "Seed of the shared synthetic world")->capture_default_str();
  c_gs->add_option("--prefix", gs.prefix, "Scene id prefix")->capture_default_str();
  c_gs->add_option("--objects", gs.params.n_objects, "Ground-truth objects per scene")->capture_default_str();
  c_gs->add_option("--confusion", gs.params.confusion, "Probability a detection favors its decoy category")
      ->capture_default_str();
  c_gs->add_option("--exclude-types", gs.exclude_types, "JSON list of [subject, predicate, object] to omit");
  c_gs->add_option("--holdout-fraction", gs.holdout_fraction, "Fraction of predicate edge types to omit")
      ->check(CLI::Range(0.0, 1.0));
  c_gs->add_option("--holdout-out", gs.holdout_out, "Where to write the omitted types");

  TrainArgs tr;
  std::uint64_t tr_seed = 0;
  int tr_epochs = 0;
  auto* c_tr = app.add_subcommand("train", "Train a policy variant from a JSON run config");
  c_tr->add_option("--config", tr.config, "Run config (JSON)")->required();
  auto* o_tr_seed = c_tr->add_option("--seed", tr_seed, "Override the config seed")->envname("VRL_SEED");
  c_tr->add_option("--out", tr.out, "Override the output directory");
  c_tr->add_option("--variant", tr.variant, "Override the policy variant");
  auto* o_tr_epochs = c_tr->add_option("--epochs", tr_epochs, "Override the epoch count");

  EvaluateArgs ev;
  std::uint64_t ev_seed = 0;
  auto* c_ev = app.add_subcommand("evaluate", "Recall@50/100 of a trained run or the random walk");
  c_ev->add_option("--run", ev.run, "Run directory written by train");
  c_ev->add_option("--graph", ev.graph, "Graph file (defaults to the run's graph)");
  c_ev->add_option("--scenes", ev.scenes, "Test scenes")->required();
  c_ev->add_option("--train-scenes", ev.train_scenes, "Training scenes for the zero-shot split");
  c_ev->add_option("--config", ev.config, "Run config supplying features for the random walk");
  c_ev->add_option("--variant", ev.variant, "random-walk when no --run is given");
  auto* o_ev_seed = c_ev->add_option("--seed", ev_seed, "Evaluation seed")->envname("VRL_SEED");
  c_ev->add_option("--jobs", ev.jobs, "Worker threads")->envname("VRL_JOBS")->check(CLI::PositiveNumber);
  c_ev->add_option("--out", ev.out, "Report JSON (stdout when omitted)");
  c_ev->add_option("--csv", ev.csv, "Metrics CSV");

  AblateArgs ab;
  int ab_epochs = 0;
  auto* c_ab = app.add_subcommand("ablate", "Train and compare policy variants over several seeds");
  c_ab->add_option("--graph", ab.graph, "Graph file")->required();
  c_ab->add_option("--scenes", ab.scenes, "Scene set (test set when --train-scenes is given)")->required();
  c_ab->add_option("--train-scenes", ab.train_scenes, "Training scenes");
  c_ab->add_option("--train-fraction", ab.train_fraction, "Leading fraction used for training without --train-scenes")
      ->capture_default_str();
  c_ab->add_option("--config", ab.config, "Run config supplying features and training settings");
  c_ab->add_option("--seeds", ab.seeds, "Number of seeds")->capture_default_str();
  c_ab->add_option("--seed-base", ab.seed_base, "First seed")->envname("VRL_SEED")->capture_default_str();
  c_ab->add_option("--variants", ab.variants, "Variants to compare")->capture_default_str();
  auto* o_ab_epochs = c_ab->add_option("--epochs", ab_epochs, "Override the epoch count");
  c_ab->add_option("--jobs", ab.jobs, "Worker threads for evaluation")->envname("VRL_JOBS")
      ->check(CLI::PositiveNumber);
  c_ab->add_option("--out", ab.out, "CSV with one row per variant and seed (stdout when omitted)");
  c_ab->add_option("--summary", ab.summary, "JSON with per-variant medians");

  InspectArgs in;
  auto* c_in = app.add_subcommand("inspect", "Dump graph statistics and an episode trace with action sets");
  c_in->add_option("--graph", in.graph, "Graph file")->required();
  c_in->add_option("--scenes", in.scenes, "Scene file");
  c_in->add_option("--index", in.index, "Scene index")->capture_default_str();
  c_in->add_option("--model", in.model, "Checkpoint to trace (random walk otherwise)");
  c_in->add_option("--variant", in.variant, "Untrained variant to trace")->capture_default_str();
  c_in->add_option("--seed", in.seed, "Episode seed")->envname("VRL_SEED")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (o_tr_seed->count()) tr.seed = tr_seed;
  if (o_tr_epochs->count()) tr.epochs = tr_epochs;
  if (o_ev_seed->count()) ev.seed = ev_seed;
  if (o_ab_epochs->count()) ab.epochs = ab_epochs;

  try {
    if (*c_gc) return gen_counts(gc);
    if (*c_bg) return build_graph_cmd(bg);
    if (*c_gs) return gen_scenes(gs);
    if (*c_tr) return train_cmd(tr);
    if (*c_ev) return evaluate_cmd(ev);
    if (*c_ab) return ablate_cmd(ab);
    if (*c_in) return inspect_cmd(in);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace
}  // namespace vrl::cli

int main(int argc, char** argv) { return vrl::cli::run(argc, argv); }
