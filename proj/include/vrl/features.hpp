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

// State features. The state vector is the concatenation
//
//   [image | subject | object | rel1 | rel2 | attr1 | attr2]
//
// where rel*/attr* embed the two most recent relationship and attribute
// phrases. Image and instance features come from a FeatureProvider: either
// a synthetic one (deterministic hashes plus a category signal) or a file of
// precomputed vectors.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "vrl/action_graph.hpp"
#include "vrl/binary_io.hpp"
#include "vrl/common.hpp"
#include "vrl/scene.hpp"

namespace vrl {

using Vector = Eigen::VectorXd;

struct FeatureConfig {
  int d_image = 64;
  int d_instance = 64;
  int d_phrase = 32;
  std::uint64_t phrase_seed = 0;

  int history_dim() const { return 4 * d_phrase; }
  int state_dim() const { return d_image + 2 * d_instance + history_dim(); }

  static FeatureConfig full_scale() { return {4096, 4096, 2400, 0}; }

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

// Unit-norm Gaussian vector drawn from a counter-based hash of `key`.
inline Vector hashed_unit_vector(std::string_view key, int dim, std::uint64_t seed) {
  Vector v(dim);
  const std::uint64_t base = splitmix64(seed ^ fnv1a(key));
  for (int i = 0; i < dim; i += 2) {
    // Box-Muller on two 53-bit uniforms.
    const double u1 = (static_cast<double>(splitmix64(base + 2 * static_cast<std::uint64_t>(i)) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(splitmix64(base + 2 * static_cast<std::uint64_t>(i) + 1) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < dim) v[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

// Substitute for a sentence-embedding model: deterministic, unit L2 norm;
// the empty phrase embeds to zeros.
inline Vector phrase_embedding(const std::string& phrase, int d_phrase, std::uint64_t seed) {
  VRL_REQUIRE(d_phrase >= 1, "d_phrase must be >= 1");
  if (phrase.empty()) return Vector::Zero(d_phrase);
  return hashed_unit_vector("phrase:" + phrase, d_phrase, seed);
}

enum class PhraseKind { kRelationship, kAttribute };

// Two most recent phrases of each kind; slot 0 is the newest. An empty
// string is the Empty slot.
struct HistoryBuffer {
  std::array<std::string, 2> rel_slots;
  std::array<std::string, 2> attr_slots;

  friend bool operator==(const HistoryBuffer&, const HistoryBuffer&) = default;
};

inline HistoryBuffer update_history(HistoryBuffer hist, const std::string& phrase, PhraseKind kind) {
  auto& slots = kind == PhraseKind::kRelationship ? hist.rel_slots : hist.attr_slots;
  slots[1] = std::move(slots[0]);
  slots[0] = phrase;
  return hist;
}

inline Vector history_embedding(const HistoryBuffer& hist, const FeatureConfig& cfg) {
  Vector out(cfg.history_dim());
  const std::array<const std::string*, 4> order = {&hist.rel_slots[0], &hist.rel_slots[1],
                                                   &hist.attr_slots[0], &hist.attr_slots[1]};
  for (int i = 0; i < 4; ++i)
    out.segment(i * cfg.d_phrase, cfg.d_phrase) = phrase_embedding(*order[static_cast<std::size_t>(i)], cfg.d_phrase, cfg.phrase_seed);
  return out;
}

inline Vector concat_state(const Vector& image, const Vector& subj, const Vector& obj,
                           const Vector& tail) {
  Vector f(image.size() + subj.size() + obj.size() + tail.size());
  f << image, subj, obj, tail;
  return f;
}

inline Vector assemble_state(const Vector& image, const Vector& subj, const Vector& obj,
                             const HistoryBuffer& hist, const FeatureConfig& cfg) {
  VRL_REQUIRE(image.size() == cfg.d_image, "image feature dimension mismatch");
  VRL_REQUIRE(subj.size() == cfg.d_instance, "subject feature dimension mismatch");
  VRL_REQUIRE(obj.size() == cfg.d_instance, "object feature dimension mismatch");
  return concat_state(image, subj, obj, history_embedding(hist, cfg));
}

// One (category, attribute, predicate) action triple; unset members are
// Null / Terminal and leave their one-hot segment zero.
struct ActionRecord {
  std::optional<CategoryId> category;
  std::optional<AttributeId> attribute;
  std::optional<PredicateId> predicate;
};

inline constexpr int kActionHistoryLength = 4;

// Concatenation of the last four actions as (|C| + |A| + |P|)-dim
// multi-hot vectors, newest first; missing entries are zero.
inline Vector action_history_block(const std::deque<ActionRecord>& recent, std::size_t n_cat,
                                   std::size_t n_attr, std::size_t n_pred) {
  const auto width = static_cast<Eigen::Index>(n_cat + n_attr + n_pred);
  Vector out = Vector::Zero(kActionHistoryLength * width);
  for (std::size_t i = 0; i < recent.size() && i < kActionHistoryLength; ++i) {
    const Eigen::Index base = static_cast<Eigen::Index>(i) * width;
    const auto& r = recent[i];
    if (r.category) out[base + r.category->value] = 1.0;
    if (r.attribute) out[base + static_cast<Eigen::Index>(n_cat) + r.attribute->value] = 1.0;
    if (r.predicate) out[base + static_cast<Eigen::Index>(n_cat + n_attr) + r.predicate->value] = 1.0;
  }
  return out;
}

inline std::string instance_key(const Scene& scene, const ObjectInstance& inst) {
  return scene.id + "/" + std::to_string(inst.id);
}

class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual int image_dim() const = 0;
  virtual int instance_dim() const = 0;
  virtual Vector image_feature(const Scene& scene) const = 0;
  virtual Vector instance_feature(const Scene& scene, const ObjectInstance& inst) const = 0;
};

// Simulated detector / whole-image features. The image vector mixes the
// embeddings of the categories present in the scene (a global context cue);
// an instance vector embeds the category of the gt object it localizes
// (its appearance), falling back to its top detected category. Both carry
// additive noise hashed from the scene id, instance id and box, so they do
// not depend on instance list order.
class SyntheticFeatureProvider final : public FeatureProvider {
 public:
  SyntheticFeatureProvider(std::size_t num_categories, int d_image, int d_instance,
                           std::uint64_t seed, double noise = 0.3)
      : d_image_(d_image), d_instance_(d_instance), seed_(seed), noise_(noise) {
    image_emb_.reserve(num_categories);
    inst_emb_.reserve(num_categories);
    for (std::size_t c = 0; c < num_categories; ++c) {
      image_emb_.push_back(hashed_unit_vector("img-cat:" + std::to_string(c), d_image, seed));
      inst_emb_.push_back(hashed_unit_vector("inst-cat:" + std::to_string(c), d_instance, seed));
    }
  }

  int image_dim() const override { return d_image_; }
  int instance_dim() const override { return d_instance_; }

  Vector image_feature(const Scene& scene) const override {
    Vector v = Vector::Zero(d_image_);
    for (const auto& o : scene.gt.objects) v += image_emb_.at(o.category.index());
    if (v.norm() > 0.0) v /= v.norm();
    return v + noise_ * hashed_unit_vector("img:" + scene.image_feature_key, d_image_, seed_);
  }

  Vector instance_feature(const Scene& scene, const ObjectInstance& inst) const override {
    CategoryId cat = inst.top_category();
    double best = kMatchIou;
    for (const auto& o : scene.gt.objects) {
      const double v = iou(inst.box, o.box);
      if (v >= best) {
        best = v;
        cat = o.category;
      }
    }
    std::string key = "inst:" + instance_key(scene, inst);
    for (double x : {inst.box.cx, inst.box.cy, inst.box.w, inst.box.h}) {
      key += ':';
      key += hex64(std::bit_cast<std::uint64_t>(x));
    }
    return inst_emb_.at(cat.index()) + noise_ * hashed_unit_vector(key, d_instance_, seed_);
  }

 private:
  int d_image_;
  int d_instance_;
  std::uint64_t seed_;
  double noise_;
  std::vector<Vector> image_emb_;
  std::vector<Vector> inst_emb_;
};

// Precomputed feature file (little-endian):
//   "VRLF" | u32 version=1 | u32 d_image | u32 d_instance | u64 count
//   count x { u32 key_len | key bytes | u32 dim | dim x f32 }
// Image records are keyed by the scene's image_feature_key, instance
// records by "<scene id>/<instance id>".
inline constexpr std::uint32_t kFeatureFileVersion = 1;

class FileFeatureProvider final : public FeatureProvider {
 public:
  explicit FileFeatureProvider(const std::string& path) {
    const std::string data = read_file(path);
    ByteReader r(data, path);
    if (r.bytes(4) != "VRLF") throw IngestError(path + ": not a feature file");
    if (r.u32() != kFeatureFileVersion) throw IngestError(path + ": unsupported feature file version");
    d_image_ = static_cast<int>(r.u32());
    d_instance_ = static_cast<int>(r.u32());
    const std::uint64_t count = r.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
      std::string key = r.str();
      const std::uint32_t dim = r.u32();
      std::vector<float> v(dim);
      for (auto& x : v) x = r.f32();
      if (!table_.emplace(std::move(key), std::move(v)).second)
        throw IngestError(path + ": duplicate feature key");
    }
    if (!r.done()) throw IngestError(path + ": trailing bytes after feature records");
  }

  int image_dim() const override { return d_image_; }
  int instance_dim() const override { return d_instance_; }

  Vector image_feature(const Scene& scene) const override {
    return lookup(scene.image_feature_key, d_image_);
  }
  Vector instance_feature(const Scene& scene, const ObjectInstance& inst) const override {
    return lookup(instance_key(scene, inst), d_instance_);
  }

  const std::vector<float>& raw(const std::string& key) const {
    auto it = table_.find(key);
    if (it == table_.end()) throw LookupError("no features for key '" + key + "'");
    return it->second;
  }

 private:
  Vector lookup(const std::string& key, int dim) const {
    const auto& v = raw(key);
    if (static_cast<int>(v.size()) != dim)
      throw ContractViolation("feature '" + key + "' has wrong dimension");
    Vector out(dim);
    for (int i = 0; i < dim; ++i) out[i] = static_cast<double>(v[static_cast<std::size_t>(i)]);
    return out;
  }

  int d_image_ = 0;
  int d_instance_ = 0;
  std::unordered_map<std::string, std::vector<float>> table_;
};

// Exports every image and instance vector of `scenes` from `provider`.
inline void write_feature_file(const std::string& path, const FeatureProvider& provider,
                               const std::vector<Scene>& scenes) {
  ByteWriter body;
  std::uint64_t count = 0;
  std::set<std::string> seen;
  auto put = [&](const std::string& key, const Vector& v) {
    if (!seen.insert(key).second) return;
    body.str(key);
    body.u32(static_cast<std::uint32_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) body.f32(static_cast<float>(v[i]));
    ++count;
  };
  for (const auto& s : scenes) {
    put(s.image_feature_key, provider.image_feature(s));
    for (const auto& inst : s.instances) put(instance_key(s, inst), provider.instance_feature(s, inst));
  }
  ByteWriter out;
  out.bytes("VRLF");
  out.u32(kFeatureFileVersion);
  out.u32(static_cast<std::uint32_t>(provider.image_dim()));
  out.u32(static_cast<std::uint32_t>(provider.instance_dim()));
  out.u64(count);
  out.bytes(body.data());
  write_file_atomic(path, out.data());
}

}  // namespace vrl
