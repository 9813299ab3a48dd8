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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vrl/eval.hpp"

namespace vrl {
namespace {

const CategoryId kMan(0), kHorse(1), kHat(2);
const PredicateId kRiding(0), kWearing(1);

Scene two_phrase_scene() {
  Scene s;
  s.id = "s";
  s.gt.objects = {{kMan, {2, 2, 2, 2}}, {kHorse, {2, 4, 3, 2}}, {kHat, {2, 1, 1, 1}}};
  s.gt.pred_phrases = {{0, kRiding, 1}, {0, kWearing, 2}};
  s.gt.attr_phrases = {{0, AttributeId(0)}};
  s.gt.normalize();
  return s;
}

Prediction relation(CategoryId sc, BoundingBox sb, PredicateId p, CategoryId oc, BoundingBox ob, double q = 0.0,
                    double cs = 1.0, double co = 1.0) {
  Prediction r;
  r.kind = PredictionKind::kRelationship;
  r.subject = {0, sc, sb, cs};
  r.object = PredictedInstance{1, oc, ob, co};
  r.label = p.value;
  r.q_value = q;
  return r;
}

TEST(RankTest, ScoreExample) {
  Prediction p = relation(kMan, {}, kRiding, kHorse, {}, 0.0, 0.9, 0.8);
  EXPECT_NEAR(rank_score(p), 0.9 * 0.8 * 0.5, 1e-12);
  p.subject.confidence = 0.0;
  const auto ranked = rank_predictions({p, relation(kMan, {}, kRiding, kHorse, {}, -20.0, 0.1, 0.1)});
  EXPECT_EQ(ranked.back().subject.confidence, 0.0);
}

TEST(RankTest, MonotoneInQ) {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const double q = 10 * (uniform01(rng) - 0.5);
    Prediction a = relation(kMan, {}, kRiding, kHorse, {}, q, 0.5, 0.7);
    Prediction b = a;
    b.q_value = q + 0.1 + uniform01(rng);
    EXPECT_LT(rank_score(a), rank_score(b));
  }
}

TEST(RecallTest, HalfCoveredAndEmpty) {
  const Scene s = two_phrase_scene();
  const std::vector<Prediction> preds{
      relation(kMan, {2, 2, 2, 2}, kRiding, kHorse, {2, 4, 3, 2}),
      relation(kMan, {2, 2, 2, 2}, kRiding, kHorse, {2, 4, 3, 2}),
      relation(kMan, {2, 2, 2, 2}, kWearing, kHat, {8, 8, 1, 1})};
  EXPECT_DOUBLE_EQ(recall_at_k(preds, s, 50, Task::kRelationship), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k({}, s, 50, Task::kRelationship), 0.0);
  EXPECT_THROW(recall_at_k(preds, s, 0, Task::kRelationship), ContractViolation);
  Scene none = s;
  none.gt.pred_phrases.clear();
  EXPECT_EQ(recall_count(preds, none, 50, Task::kRelationship).total, 0u);
}

TEST(RecallTest, PhraseTaskUsesEnclosingBox) {
  const Scene s = two_phrase_scene();
  // Object box is off but the enclosing box still overlaps by more than half.
  const auto p = relation(kMan, {2, 2, 2, 2}, kRiding, kHorse, {2, 4.2, 2.2, 1.6});
  const auto q = relation(kMan, {2, 2, 2, 2}, kRiding, kHorse, {2, 4.9, 0.8, 0.5});
  EXPECT_DOUBLE_EQ(recall_at_k(std::vector<Prediction>{q}, s, 1, Task::kPhrase), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_k(std::vector<Prediction>{q}, s, 1, Task::kRelationship), 0.0);
  EXPECT_DOUBLE_EQ(recall_at_k(std::vector<Prediction>{p}, s, 1, Task::kRelationship), 0.5);
}

// Independent coverage count using oracle::box_iou.
std::size_t oracle_covered(const std::vector<Prediction>& ranked, const Scene& s, std::size_t k) {
  std::size_t hit = 0;
  for (const auto& ph : s.gt.pred_phrases) {
    const auto& a = s.gt.objects[static_cast<std::size_t>(ph.subject)];
    const auto& b = s.gt.objects[static_cast<std::size_t>(ph.object)];
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
      const auto& p = ranked[i];
      if (p.label == ph.predicate.value && p.subject.category == a.category && p.object->category == b.category &&
          oracle::box_iou(p.subject.box, a.box) >= 0.5 && oracle::box_iou(p.object->box, b.box) >= 0.5) {
        ++hit;
        break;
      }
    }
  }
  return hit;
}

TEST(RecallTest, MatchesOracleAndIsMonotoneInK) {
  Rng rng(17);
  const SemanticGraph g = testing::random_graph(rng, 4, 3, 3, 0.5);
  for (int trial = 0; trial < 300; ++trial) {
    const Scene s = testing::random_scene(g, rng, 5, 4);
    std::vector<Prediction> preds;
    const int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      const auto& a = s.gt.objects[rng() % s.gt.objects.size()];
      const auto& b = s.gt.objects[rng() % s.gt.objects.size()];
      auto jitter = [&](BoundingBox x) {
        x.cx += uniform01(rng) - 0.5;
        x.w *= 0.7 + 0.6 * uniform01(rng);
        return x;
      };
      preds.push_back(relation(a.category, jitter(a.box), PredicateId(static_cast<std::int32_t>(rng() % 3)),
                               b.category, jitter(b.box), uniform01(rng)));
    }
    const auto ranked = rank_predictions(preds);
    double prev = 0;
    for (std::size_t k : {1, 2, 5, 10, 50, 100}) {
      const auto rc = recall_count(ranked, s, k, Task::kRelationship);
      EXPECT_EQ(rc.total, s.gt.pred_phrases.size());
      EXPECT_EQ(rc.matched, oracle_covered(ranked, s, k));
      EXPECT_GE(rc.ratio(), prev);
      prev = rc.ratio();
    }
  }
}

TEST(RecallTest, AttributeTask) {
  const Scene s = two_phrase_scene();
  Prediction a;
  a.kind = PredictionKind::kAttribute;
  a.subject = {0, kMan, {2, 2, 2, 2}, 1.0};
  a.label = 0;
  EXPECT_DOUBLE_EQ(recall_at_k(std::vector<Prediction>{a}, s, 50, Task::kAttribute), 1.0);
  a.subject.category = kHat;
  EXPECT_DOUBLE_EQ(recall_at_k(std::vector<Prediction>{a}, s, 50, Task::kAttribute), 0.0);
}

TEST(ZeroShotTest, SplitProperties) {
  Rng rng(5);
  const SemanticGraph g = testing::random_graph(rng, 5, 3, 3, 0.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Scene> train, test;
    for (int i = 0; i < 4; ++i) train.push_back(testing::random_scene(g, rng, 4, 3));
    for (int i = 0; i < 4; ++i) test.push_back(testing::random_scene(g, rng, 4, 3));
    const auto z = zero_shot_split(train, test);
    const auto seen = predicate_types(train);
    const auto in_test = predicate_types(test);
    for (const auto& t : z.unseen_types) {
      EXPECT_FALSE(seen.contains(t));
      EXPECT_TRUE(in_test.contains(t));
    }
    for (const auto& t : in_test) EXPECT_TRUE(seen.contains(t) || z.unseen_types.contains(t));
    EXPECT_TRUE(zero_shot_split(train, train).unseen_types.empty());

    // Restricting to a subset of types counts a subset of gt phrases.
    std::vector<Prediction> preds;
    for (const auto& ph : test[0].gt.pred_phrases) {
      const auto& a = test[0].gt.objects[static_cast<std::size_t>(ph.subject)];
      const auto& b = test[0].gt.objects[static_cast<std::size_t>(ph.object)];
      if (rng() % 2) preds.push_back(relation(a.category, a.box, ph.predicate, b.category, b.box));
    }
    const auto all = recall_count(preds, test[0], 50, Task::kRelationship);
    const auto only = recall_count(preds, test[0], 50, Task::kRelationship, &z.unseen_types);
    EXPECT_LE(only.total, all.total);
    EXPECT_LE(only.matched, all.matched);
  }
}

TEST(SummaryTest, SkipsScenesWithoutPhrasesAndReports) {
  Scene s = two_phrase_scene();
  Scene empty = s;
  empty.gt.pred_phrases.clear();
  empty.gt.attr_phrases.clear();
  const std::vector<Prediction> preds{relation(kMan, {2, 2, 2, 2}, kRiding, kHorse, {2, 4, 3, 2})};
  const RecallSummary sum = summarize_recall({s, empty}, {preds, {}});
  EXPECT_DOUBLE_EQ(sum.at(Task::kRelationship, 50), 0.5);
  EXPECT_DOUBLE_EQ(sum.at(Task::kAttribute, 100), 0.0);
  const auto j = recall_report(sum, false);
  EXPECT_EQ(j["scene_count"], 2);
  EXPECT_DOUBLE_EQ(j["relationship"]["recall@50"].get<double>(), 0.5);
  EXPECT_FALSE(j.contains("zero_shot"));
}

}  // namespace
}  // namespace vrl
