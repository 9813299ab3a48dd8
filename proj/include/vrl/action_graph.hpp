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

// Directed semantic action graph: object categories, attributes and
// predicates as nodes, observed attribute phrases (c, a) and predicate
// phrases (c, p, c') as directed edges. The graph is the full action space
// of the agent; per-step action sets are subsets of its adjacency.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vrl/common.hpp"

namespace vrl {

template <typename Tag>
struct StrongId {
  std::int32_t value = -1;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::int32_t v) : value(v) {}
  constexpr std::size_t index() const { return static_cast<std::size_t>(value); }
  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

struct CategoryTag {};
struct AttributeTag {};
struct PredicateTag {};
using CategoryId = StrongId<CategoryTag>;
using AttributeId = StrongId<AttributeTag>;
using PredicateId = StrongId<PredicateTag>;

struct AttributePhraseCount {
  std::string subject;
  std::string attribute;
  std::int64_t count = 0;
};

struct PredicatePhraseCount {
  std::string subject;
  std::string predicate;
  std::string object;
  std::int64_t count = 0;
};

struct PhraseCounts {
  std::vector<AttributePhraseCount> attribute_phrases;
  std::vector<PredicatePhraseCount> predicate_phrases;
};

struct GraphStats {
  std::size_t categories = 0;
  std::size_t attributes = 0;
  std::size_t predicates = 0;
  std::size_t attribute_edges = 0;
  std::size_t predicate_edges = 0;
  // Distinct attribute / predicate words adjacent to a category, averaged
  // over all categories.
  double mean_attribute_degree = 0.0;
  double mean_predicate_degree = 0.0;
};

inline constexpr int kGraphFormatVersion = 1;

class SemanticGraph {
 public:
  SemanticGraph() = default;

  std::size_t num_categories() const { return categories_.size(); }
  std::size_t num_attributes() const { return attributes_.size(); }
  std::size_t num_predicates() const { return predicates_.size(); }
  bool empty() const {
    return categories_.empty() && attributes_.empty() && predicates_.empty();
  }

  const std::vector<std::string>& category_names() const { return categories_; }
  const std::vector<std::string>& attribute_names() const { return attributes_; }
  const std::vector<std::string>& predicate_names() const { return predicates_; }

  const std::string& name(CategoryId c) const { return categories_.at(check(c).index()); }
  const std::string& name(AttributeId a) const { return attributes_.at(a.index()); }
  const std::string& name(PredicateId p) const { return predicates_.at(p.index()); }

  std::optional<CategoryId> find_category(const std::string& n) const {
    return find_in<CategoryId>(categories_, n);
  }
  std::optional<AttributeId> find_attribute(const std::string& n) const {
    return find_in<AttributeId>(attributes_, n);
  }
  std::optional<PredicateId> find_predicate(const std::string& n) const {
    return find_in<PredicateId>(predicates_, n);
  }

  CategoryId category(const std::string& n) const {
    if (auto c = find_category(n)) return *c;
    throw LookupError("unknown category '" + n + "'");
  }
  AttributeId attribute(const std::string& n) const {
    if (auto a = find_attribute(n)) return *a;
    throw LookupError("unknown attribute '" + n + "'");
  }
  PredicateId predicate(const std::string& n) const {
    if (auto p = find_predicate(n)) return *p;
    throw LookupError("unknown predicate '" + n + "'");
  }

  // Attribute successors of c, sorted ascending.
  std::span<const AttributeId> attributes_of(CategoryId c) const {
    return attr_edges_[check(c).index()];
  }

  // {p : (c, p, c2) in E_P}, sorted ascending. Direction-sensitive.
  std::span<const PredicateId> predicates_between(CategoryId c, CategoryId c2) const {
    check(c);
    check(c2);
    auto it = pred_edges_.find({c.value, c2.value});
    if (it == pred_edges_.end()) return {};
    return it->second;
  }

  // Distinct predicates on edges leaving c.
  std::size_t predicate_out_degree(CategoryId c) const {
    return pred_out_degree_[check(c).index()];
  }

  bool has_attribute_edge(CategoryId c, AttributeId a) const {
    auto s = attributes_of(c);
    return std::binary_search(s.begin(), s.end(), a);
  }
  bool has_predicate_edge(CategoryId c, PredicateId p, CategoryId c2) const {
    auto s = predicates_between(c, c2);
    return std::binary_search(s.begin(), s.end(), p);
  }

  // Flat edge lists in canonical (sorted) order.
  std::vector<std::pair<CategoryId, AttributeId>> attribute_edges() const {
    std::vector<std::pair<CategoryId, AttributeId>> out;
    for (std::size_t c = 0; c < attr_edges_.size(); ++c)
      for (AttributeId a : attr_edges_[c]) out.emplace_back(CategoryId(static_cast<std::int32_t>(c)), a);
    return out;
  }
  std::vector<std::tuple<CategoryId, PredicateId, CategoryId>> predicate_edges() const {
    std::vector<std::tuple<CategoryId, PredicateId, CategoryId>> out;
    for (const auto& [key, preds] : pred_edges_)
      for (PredicateId p : preds) out.emplace_back(CategoryId(key.first), p, CategoryId(key.second));
    return out;
  }

  // Category pairs (c, c2) with at least one predicate edge.
  std::vector<std::pair<CategoryId, CategoryId>> related_pairs() const {
    std::vector<std::pair<CategoryId, CategoryId>> out;
    out.reserve(pred_edges_.size());
    for (const auto& kv : pred_edges_)
      out.emplace_back(CategoryId(kv.first.first), CategoryId(kv.first.second));
    return out;
  }

  // Number of typed phrases retained by thresholding (before reduction to
  // word nodes).
  std::size_t attribute_phrase_types() const { return attr_phrase_types_; }
  std::size_t predicate_phrase_types() const { return pred_phrase_types_; }

  GraphStats stats() const {
    GraphStats s;
    s.categories = num_categories();
    s.attributes = num_attributes();
    s.predicates = num_predicates();
    for (const auto& v : attr_edges_) s.attribute_edges += v.size();
    for (const auto& kv : pred_edges_) s.predicate_edges += kv.second.size();
    if (!categories_.empty()) {
      std::size_t pred_deg = 0;
      for (std::size_t d : pred_out_degree_) pred_deg += d;
      s.mean_attribute_degree = static_cast<double>(s.attribute_edges) / s.categories;
      s.mean_predicate_degree = static_cast<double>(pred_deg) / s.categories;
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "vrl-semantic-graph";
    j["version"] = kGraphFormatVersion;
    j["categories"] = categories_;
    j["attributes"] = attributes_;
    j["predicates"] = predicates_;
    auto ae = nlohmann::json::array();
    for (auto [c, a] : attribute_edges()) ae.push_back({c.value, a.value});
    auto pe = nlohmann::json::array();
    for (auto [c, p, c2] : predicate_edges()) pe.push_back({c.value, p.value, c2.value});
    j["attr_edges"] = std::move(ae);
    j["pred_edges"] = std::move(pe);
    j["phrase_types"] = {{"attribute", attr_phrase_types_}, {"predicate", pred_phrase_types_}};
    return j;
  }

  std::string serialize() const { return to_json().dump(); }
  std::uint64_t content_hash() const { return fnv1a(serialize()); }

  static SemanticGraph from_json(const nlohmann::json& j);

  friend bool operator==(const SemanticGraph& a, const SemanticGraph& b) {
    return a.categories_ == b.categories_ && a.attributes_ == b.attributes_ &&
           a.predicates_ == b.predicates_ && a.attr_edges_ == b.attr_edges_ &&
           a.pred_edges_ == b.pred_edges_ &&
           a.attr_phrase_types_ == b.attr_phrase_types_ &&
           a.pred_phrase_types_ == b.pred_phrase_types_;
  }

 private:
  friend class GraphBuilder;

  template <typename Id>
  static std::optional<Id> find_in(const std::vector<std::string>& names, const std::string& n) {
    auto it = std::lower_bound(names.begin(), names.end(), n);
    if (it == names.end() || *it != n) return std::nullopt;
    return Id(static_cast<std::int32_t>(it - names.begin()));
  }

  CategoryId check(CategoryId c) const {
    if (c.value < 0 || c.index() >= categories_.size())
      throw LookupError("category index " + std::to_string(c.value) + " not in graph");
    return c;
  }

  void finalize() {
    pred_out_degree_.assign(categories_.size(), 0);
    std::vector<std::set<std::int32_t>> seen(categories_.size());
    for (const auto& [key, preds] : pred_edges_)
      for (PredicateId p : preds) seen[static_cast<std::size_t>(key.first)].insert(p.value);
    for (std::size_t c = 0; c < seen.size(); ++c) pred_out_degree_[c] = seen[c].size();
  }

  std::vector<std::string> categories_;
  std::vector<std::string> attributes_;
  std::vector<std::string> predicates_;
  std::vector<std::vector<AttributeId>> attr_edges_;
  std::map<std::pair<std::int32_t, std::int32_t>, std::vector<PredicateId>> pred_edges_;
  std::vector<std::size_t> pred_out_degree_;
  std::size_t attr_phrase_types_ = 0;
  std::size_t pred_phrase_types_ = 0;
};

class GraphBuilder {
 public:
  // Builds a graph from explicit node tables (each sorted, unique) and
  // edges given as index tuples. Validates every endpoint.
  static SemanticGraph from_tables(
      std::vector<std::string> categories, std::vector<std::string> attributes,
      std::vector<std::string> predicates,
      const std::vector<std::pair<std::int32_t, std::int32_t>>& attr_edges,
      const std::vector<std::tuple<std::int32_t, std::int32_t, std::int32_t>>& pred_edges,
      std::size_t attr_types, std::size_t pred_types) {
    auto sorted_unique = [](const std::vector<std::string>& v) {
      return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (!sorted_unique(categories) || !sorted_unique(attributes) || !sorted_unique(predicates))
      throw IngestError("graph node tables must be sorted and unique");
    SemanticGraph g;
    g.categories_ = std::move(categories);
    g.attributes_ = std::move(attributes);
    g.predicates_ = std::move(predicates);
    g.attr_edges_.assign(g.categories_.size(), {});
    const auto nc = static_cast<std::int32_t>(g.categories_.size());
    const auto na = static_cast<std::int32_t>(g.attributes_.size());
    const auto np = static_cast<std::int32_t>(g.predicates_.size());
    auto in = [](std::int32_t v, std::int32_t n) { return v >= 0 && v < n; };
    for (auto [c, a] : attr_edges) {
      if (!in(c, nc) || !in(a, na)) throw IngestError("attribute edge endpoint out of range");
      g.attr_edges_[static_cast<std::size_t>(c)].push_back(AttributeId(a));
    }
    for (auto [c, p, c2] : pred_edges) {
      if (!in(c, nc) || !in(p, np) || !in(c2, nc))
        throw IngestError("predicate edge endpoint out of range");
      g.pred_edges_[{c, c2}].push_back(PredicateId(p));
    }
    for (auto& v : g.attr_edges_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (auto& [key, v] : g.pred_edges_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    g.attr_phrase_types_ = attr_types;
    g.pred_phrase_types_ = pred_types;
    g.finalize();
    return g;
  }
};

inline SemanticGraph SemanticGraph::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "vrl-semantic-graph")
      throw IngestError("not a semantic graph file");
    if (j.at("version").get<int>() != kGraphFormatVersion)
      throw IngestError("unsupported graph file version " + j.at("version").dump());
    std::vector<std::pair<std::int32_t, std::int32_t>> ae;
    for (const auto& e : j.at("attr_edges")) ae.emplace_back(e.at(0), e.at(1));
    std::vector<std::tuple<std::int32_t, std::int32_t, std::int32_t>> pe;
    for (const auto& e : j.at("pred_edges")) pe.emplace_back(e.at(0), e.at(1), e.at(2));
    return GraphBuilder::from_tables(
        j.at("categories").get<std::vector<std::string>>(),
        j.at("attributes").get<std::vector<std::string>>(),
        j.at("predicates").get<std::vector<std::string>>(), ae, pe,
        j.at("phrase_types").at("attribute").get<std::size_t>(),
        j.at("phrase_types").at("predicate").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("malformed graph file: ") + e.what());
  }
}

// Keeps exactly the phrases with count >= min_count; node tables are the
// words of retained phrases, indexed lexicographically.
inline SemanticGraph build_graph(const PhraseCounts& counts, std::int64_t min_count) {
  VRL_REQUIRE(min_count >= 1, "min_count must be >= 1");
  std::set<std::string> cats, attrs, preds;
  std::set<std::pair<std::string, std::string>> attr_keys;
  std::set<std::tuple<std::string, std::string, std::string>> pred_keys;
  std::size_t index = 0;
  for (const auto& r : counts.attribute_phrases) {
    ++index;
    if (r.subject.empty() || r.attribute.empty() || r.count < 0)
      throw IngestError("malformed attribute phrase record " + std::to_string(index), index);
    if (!attr_keys.emplace(r.subject, r.attribute).second)
      throw IngestError("duplicate attribute phrase record " + std::to_string(index), index);
  }
  for (const auto& r : counts.predicate_phrases) {
    ++index;
    if (r.subject.empty() || r.predicate.empty() || r.object.empty() || r.count < 0)
      throw IngestError("malformed predicate phrase record " + std::to_string(index), index);
    if (!pred_keys.emplace(r.subject, r.predicate, r.object).second)
      throw IngestError("duplicate predicate phrase record " + std::to_string(index), index);
  }

  std::size_t attr_types = 0, pred_types = 0;
  for (const auto& r : counts.attribute_phrases) {
    if (r.count < min_count) continue;
    cats.insert(r.subject);
    attrs.insert(r.attribute);
    ++attr_types;
  }
  for (const auto& r : counts.predicate_phrases) {
    if (r.count < min_count) continue;
    cats.insert(r.subject);
    cats.insert(r.object);
    preds.insert(r.predicate);
    ++pred_types;
  }
  std::vector<std::string> cv(cats.begin(), cats.end());
  std::vector<std::string> av(attrs.begin(), attrs.end());
  std::vector<std::string> pv(preds.begin(), preds.end());
  auto idx = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::int32_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };
  std::vector<std::pair<std::int32_t, std::int32_t>> ae;
  for (const auto& r : counts.attribute_phrases)
    if (r.count >= min_count) ae.emplace_back(idx(cv, r.subject), idx(av, r.attribute));
  std::vector<std::tuple<std::int32_t, std::int32_t, std::int32_t>> pe;
  for (const auto& r : counts.predicate_phrases)
    if (r.count >= min_count)
      pe.emplace_back(idx(cv, r.subject), idx(pv, r.predicate), idx(cv, r.object));
  return GraphBuilder::from_tables(std::move(cv), std::move(av), std::move(pv), ae, pe,
                                   attr_types, pred_types);
}

// Parses the tab-separated phrase-count format:
//   A<TAB>subject<TAB>attribute<TAB>count
//   P<TAB>subject<TAB>predicate<TAB>object<TAB>count
// Blank lines and lines starting with '#' are skipped.
inline PhraseCounts parse_phrase_counts(std::istream& in) {
  PhraseCounts out;
  std::string line;
  std::size_t lineno = 0;
  auto parse_count = [&](const std::string& s) -> std::int64_t {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw IngestError("bad count '" + s + "' in record " + std::to_string(lineno), lineno);
    }
    if (pos != s.size() || v < 0)
      throw IngestError("bad count '" + s + "' in record " + std::to_string(lineno), lineno);
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, '\t')) f.push_back(tok);
    auto nonempty = [&](std::size_t from, std::size_t to) {
      for (std::size_t i = from; i < to; ++i)
        if (f[i].empty()) return false;
      return true;
    };
    if (f.size() == 4 && f[0] == "A" && nonempty(1, 3)) {
      out.attribute_phrases.push_back({f[1], f[2], parse_count(f[3])});
    } else if (f.size() == 5 && f[0] == "P" && nonempty(1, 4)) {
      out.predicate_phrases.push_back({f[1], f[2], f[3], parse_count(f[4])});
    } else {
      throw IngestError("malformed phrase record " + std::to_string(lineno), lineno);
    }
  }
  return out;
}

inline PhraseCounts read_phrase_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open phrase-count file " + path);
  try {
    return parse_phrase_counts(in);
  } catch (const IngestError& e) {
    throw e.prefixed(path + ": ");
  }
}

inline void write_phrase_counts(std::ostream& out, const PhraseCounts& counts) {
  for (const auto& r : counts.attribute_phrases)
    out << "A\t" << r.subject << '\t' << r.attribute << '\t' << r.count << '\n';
  for (const auto& r : counts.predicate_phrases)
    out << "P\t" << r.subject << '\t' << r.predicate << '\t' << r.object << '\t' << r.count << '\n';
}

inline SemanticGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open graph file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("graph file " + path + " is not valid JSON: " + e.what());
  }
  return SemanticGraph::from_json(j);
}

inline void save_graph(const SemanticGraph& g, const std::string& path) {
  write_file_atomic(path, g.serialize() + "\n");
}

}  // namespace vrl

template <typename Tag>
struct std::hash<vrl::StrongId<Tag>> {
  std::size_t operator()(vrl::StrongId<Tag> id) const noexcept {
    return std::hash<std::int32_t>()(id.value);
  }
};
