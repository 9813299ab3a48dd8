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

// Shared fixtures and random generators for the test suites.

#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "vrl/vrl.hpp"

namespace vrl::testing {

// girl -> {smiling, young}; man -riding-> horse; man -wearing-> {hat, helmet};
// person -on-> horse.
inline SemanticGraph toy_graph() {
  PhraseCounts pc;
  pc.attribute_phrases = {{"girl", "young", 40}, {"girl", "smiling", 35}};
  pc.predicate_phrases = {{"man", "riding", "horse", 50},
                          {"man", "wearing", "hat", 31},
                          {"man", "wearing", "helmet", 30},
                          {"person", "on", "horse", 30}};
  return build_graph(pc, 30);
}

inline ObjectInstance make_instance(int id, BoundingBox box, std::map<CategoryId, double> scores,
                                    double objectness = 0.9) {
  ObjectInstance o;
  o.id = id;
  o.box = box;
  for (const auto& kv : scores) o.category_scores.push_back(kv);
  o.objectness = objectness;
  return o;
}

inline std::string token(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02d", prefix, i);
  return buf;
}

// Random graph with nc / na / np nodes; each possible edge exists with
// probability `density`.
inline SemanticGraph random_graph(Rng& rng, int nc, int na, int np, double density) {
  std::vector<std::string> cs, as, ps;
  for (int i = 0; i < nc; ++i) cs.push_back(token("c", i));
  for (int i = 0; i < na; ++i) as.push_back(token("a", i));
  for (int i = 0; i < np; ++i) ps.push_back(token("p", i));
  std::vector<std::pair<std::int32_t, std::int32_t>> ae;
  std::vector<std::tuple<std::int32_t, std::int32_t, std::int32_t>> pe;
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < na; ++a)
      if (uniform01(rng) < density) ae.emplace_back(c, a);
  for (int c = 0; c < nc; ++c)
    for (int p = 0; p < np; ++p)
      for (int c2 = 0; c2 < nc; ++c2)
        if (uniform01(rng) < density) pe.emplace_back(c, p, c2);
  return GraphBuilder::from_tables(cs, as, ps, ae, pe, ae.size(), pe.size());
}

// Random scene on a small canvas so that boxes overlap and neighbor often.
// Phrases are drawn uniformly and need not be graph edges.
inline Scene random_scene(const SemanticGraph& g, Rng& rng, int n_inst, int n_gt,
                          const std::string& id = "s") {
  auto U = [&](double a, double b) { return a + (b - a) * uniform01(rng); };
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const auto nc = g.num_categories();
  Scene s;
  s.id = id;
  s.image_feature_key = id;
  for (int i = 0; i < n_gt; ++i)
    s.gt.objects.push_back({CategoryId(static_cast<std::int32_t>(pick(nc))),
                            {U(0, 6), U(0, 6), U(0.8, 3), U(0.8, 3)}});
  for (int i = 0; i < n_inst; ++i) {
    BoundingBox b{U(0, 6), U(0, 6), U(0.8, 3), U(0.8, 3)};
    if (n_gt > 0 && uniform01(rng) < 0.7) {
      const auto& gb = s.gt.objects[pick(static_cast<std::size_t>(n_gt))].box;
      b = {gb.cx + U(-0.2, 0.2), gb.cy + U(-0.2, 0.2), gb.w * U(0.85, 1.15), gb.h * U(0.85, 1.15)};
    }
    std::map<CategoryId, double> sc;
    const int k = 1 + static_cast<int>(pick(3));
    // Scores on a 0.05 grid so ties and the inclusive 0.1 margin get exercised.
    for (int j = 0; j < k; ++j)
      sc[CategoryId(static_cast<std::int32_t>(pick(nc)))] = 0.05 * static_cast<double>(4 + pick(17));
    if (n_gt > 0 && uniform01(rng) < 0.5)
      sc[s.gt.objects[pick(static_cast<std::size_t>(n_gt))].category] = 0.05 * static_cast<double>(10 + pick(11));
    s.instances.push_back(make_instance(i * 3 + 1, b, sc, 0.05 * static_cast<double>(1 + pick(20))));
  }
  if (n_gt > 0) {
    for (int i = 0; i < n_gt; ++i)
      if (g.num_attributes() > 0 && uniform01(rng) < 0.6)
        s.gt.attr_phrases.push_back({i, AttributeId(static_cast<std::int32_t>(pick(g.num_attributes())))});
    for (int i = 0; i < n_gt; ++i)
      for (int j = 0; j < n_gt; ++j)
        if (i != j && g.num_predicates() > 0 && uniform01(rng) < 0.3)
          s.gt.pred_phrases.push_back({i, PredicateId(static_cast<std::int32_t>(pick(g.num_predicates()))), j});
  }
  s.gt.normalize();
  return s;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("vrl-test-" + hex64((static_cast<std::uint64_t>(rd()) << 32) | rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace vrl::testing
