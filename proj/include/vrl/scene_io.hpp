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

// JSON-lines scene files. One scene per line:
//
//   {"id": "...", "image_feature_key": "...",
//    "instances": [{"id": 0, "box": [cx, cy, w, h],
//                   "scores": {"man": 0.9}, "objectness": 0.8}],
//    "gt": {"objects": [{"category": "man", "box": [cx, cy, w, h]}],
//           "attr_phrases": [[0, "young"]],
//           "pred_phrases": [[0, "riding", 1]]}}
//
// Token names are resolved against a graph; unknown names are errors that
// carry the offending token and line.

#pragma once

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vrl/action_graph.hpp"
#include "vrl/scene.hpp"

namespace vrl {

inline constexpr std::size_t kDefaultInstanceCap = 100;

namespace detail {

inline nlohmann::json box_to_json(const BoundingBox& b) {
  return nlohmann::json::array({b.cx, b.cy, b.w, b.h});
}

inline BoundingBox box_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_array() || j.size() != 4) throw IngestError("box must be [cx, cy, w, h]", line);
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) throw IngestError("box must have positive width and height", line);
  return b;
}

template <typename F>
auto resolve(F&& find, const std::string& token, const char* kind, std::size_t line) {
  auto v = find(token);
  if (!v) throw IngestError(std::string("unknown ") + kind + " '" + token + "'", line);
  return *v;
}

}  // namespace detail

inline nlohmann::json scene_to_json(const Scene& s, const SemanticGraph& g) {
  nlohmann::json j;
  j["id"] = s.id;
  j["image_feature_key"] = s.image_feature_key;
  auto insts = nlohmann::json::array();
  for (const auto& inst : s.instances) {
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& [c, v] : inst.category_scores) scores[g.name(c)] = v;
    insts.push_back({{"id", inst.id},
                     {"box", detail::box_to_json(inst.box)},
                     {"scores", std::move(scores)},
                     {"objectness", inst.objectness}});
  }
  j["instances"] = std::move(insts);
  auto objs = nlohmann::json::array();
  for (const auto& o : s.gt.objects)
    objs.push_back({{"category", g.name(o.category)}, {"box", detail::box_to_json(o.box)}});
  auto ap = nlohmann::json::array();
  for (const auto& p : s.gt.attr_phrases) ap.push_back({p.object, g.name(p.attribute)});
  auto pp = nlohmann::json::array();
  for (const auto& p : s.gt.pred_phrases) pp.push_back({p.subject, g.name(p.predicate), p.object});
  j["gt"] = {{"objects", std::move(objs)}, {"attr_phrases", std::move(ap)},
             {"pred_phrases", std::move(pp)}};
  return j;
}

inline Scene scene_from_json(const nlohmann::json& j, const SemanticGraph& g, std::size_t line) {
  Scene s;
  try {
    s.id = j.at("id").get<std::string>();
    s.image_feature_key = j.value("image_feature_key", s.id);
    for (const auto& ji : j.at("instances")) {
      ObjectInstance inst;
      inst.id = ji.at("id").get<int>();
      inst.box = detail::box_from_json(ji.at("box"), line);
      inst.objectness = ji.at("objectness").get<double>();
      for (const auto& [name, v] : ji.at("scores").items()) {
        CategoryId c = detail::resolve([&](const std::string& n) { return g.find_category(n); },
                                       name, "category", line);
        inst.category_scores.emplace_back(c, v.get<double>());
      }
      std::sort(inst.category_scores.begin(), inst.category_scores.end());
      s.instances.push_back(std::move(inst));
    }
    const auto& jg = j.at("gt");
    for (const auto& jo : jg.at("objects")) {
      GtObject o;
      o.category = detail::resolve([&](const std::string& n) { return g.find_category(n); },
                                   jo.at("category").get<std::string>(), "category", line);
      o.box = detail::box_from_json(jo.at("box"), line);
      s.gt.objects.push_back(o);
    }
    for (const auto& jp : jg.at("attr_phrases")) {
      GtAttributePhrase p;
      p.object = jp.at(0).get<int>();
      p.attribute = detail::resolve([&](const std::string& n) { return g.find_attribute(n); },
                                    jp.at(1).get<std::string>(), "attribute", line);
      s.gt.attr_phrases.push_back(p);
    }
    for (const auto& jp : jg.at("pred_phrases")) {
      GtPredicatePhrase p;
      p.subject = jp.at(0).get<int>();
      p.predicate = detail::resolve([&](const std::string& n) { return g.find_predicate(n); },
                                    jp.at(1).get<std::string>(), "predicate", line);
      p.object = jp.at(2).get<int>();
      s.gt.pred_phrases.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("malformed scene record: ") + e.what(), line);
  }
  s.gt.normalize();
  try {
    validate_scene(s, g);
  } catch (const ContractViolation& e) {
    throw IngestError(e.what(), line);
  }
  return s;
}

// Parses every non-blank line; applies the objectness-ranked instance cap.
inline std::vector<Scene> parse_scenes(std::istream& in, const SemanticGraph& g,
                                       std::size_t instance_cap = kDefaultInstanceCap) {
  std::vector<Scene> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    Scene s = scene_from_json(j, g, lineno);
    cap_instances(s, instance_cap);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Scene> load_scenes(const std::string& path, const SemanticGraph& g,
                                      std::size_t instance_cap = kDefaultInstanceCap) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open scene file " + path);
  try {
    return parse_scenes(in, g, instance_cap);
  } catch (const IngestError& e) {
    throw e.prefixed(path + ": ");
  }
}

inline std::string serialize_scenes(const std::vector<Scene>& scenes, const SemanticGraph& g) {
  std::string out;
  for (const auto& s : scenes) {
    out += scene_to_json(s, g).dump();
    out += '\n';
  }
  return out;
}

inline void save_scenes(const std::vector<Scene>& scenes, const SemanticGraph& g,
                        const std::string& path) {
  write_file_atomic(path, serialize_scenes(scenes, g));
}

inline std::uint64_t scene_set_hash(const std::vector<Scene>& scenes, const SemanticGraph& g) {
  return fnv1a(serialize_scenes(scenes, g));
}

}  // namespace vrl
