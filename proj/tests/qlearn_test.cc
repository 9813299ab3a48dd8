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

#include <map>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vrl/qnetwork.hpp"

namespace vrl {
namespace {

QModelConfig small_config(int state = 32, std::vector<int> hidden = {32}, bool separate = false) {
  QModelConfig c;
  c.state_dim = state;
  c.hidden = std::move(hidden);
  c.head_sizes = {5, 5, 6};
  c.separate_trunks = separate;
  return c;
}

Transition single(std::vector<float> f, std::array<int, 3> actions, std::array<double, 3> rewards) {
  Transition t;
  t.state = f;
  t.next_state = f;
  t.actions = actions;
  t.rewards = rewards;
  t.terminal = true;
  return t;
}

TEST(ForwardTest, ZeroWeightsGiveZeroQ) {
  const QModel m(small_config());
  const QValues q = forward(m, Vector::Random(32));
  for (int h = 0; h < kNumHeads; ++h) EXPECT_EQ(q[h], Vector::Zero(q[h].size()));
  EXPECT_EQ(q[2].size(), 6);
}

TEST(ForwardTest, LinearHeadIsMatrixVectorProduct) {
  QModelConfig c;
  c.state_dim = 2;
  c.hidden = {};
  c.head_sizes = {2, 1, 1};
  QModel m(c);
  m.params()[m.head_weight(0)] << 1, 2, 3, 4;
  m.params()[m.head_weight(0) + 1] << 0.5, -0.5;
  const QValues q = forward(m, Vector{{1.0, -1.0}});
  EXPECT_DOUBLE_EQ(q[0][0], 1 - 2 + 0.5);
  EXPECT_DOUBLE_EQ(q[0][1], 3 - 4 - 0.5);
  EXPECT_THROW(forward(m, Vector::Zero(3)), ContractViolation);
}

TEST(ForwardTest, RandomInitIsSensitiveToEveryInput) {
  Rng rng(4);
  const QModel m = QModel::initialized(small_config(), rng);
  EXPECT_TRUE(m.all_finite());
  Vector f = Vector::Random(32);
  const QValues base = forward(m, f);
  for (int i = 0; i < 32; ++i) {
    Vector g = f;
    g[i] += 0.5;
    const QValues q = forward(m, g);
    bool changed = false;
    for (int h = 0; h < kNumHeads; ++h) changed = changed || q[h] != base[h];
    EXPECT_TRUE(changed) << "input " << i;
  }
}

TEST(SelectTest, GreedyMaskedArgmax) {
  Rng rng(1);
  QValues q;
  q.heads = {Vector{{0.0, 5.0, 1.0}}, Vector{{2.0, 1.0, 9.0}}, Vector{{3.0, 3.0, 0.0}}};
  const auto a = select_actions(q, {std::vector<int>{0, 2}, std::vector<int>{0, 1}, std::vector<int>{0, 1}}, 0.0, rng);
  EXPECT_EQ(a[0], 2);
  EXPECT_EQ(a[1], 0);  // global max 9.0 is outside the set
  EXPECT_EQ(a[2], 0);  // tie goes to the lowest slot
}

TEST(SelectTest, GreedyInvariantToPositiveScaling) {
  Rng rng(8);
  std::normal_distribution<double> N(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    Vector q(10);
    for (int i = 0; i < 10; ++i) q[i] = N(rng);
    std::vector<int> allowed;
    for (int i = 0; i < 10; ++i)
      if (rng() % 2) allowed.push_back(i);
    if (allowed.empty()) allowed.push_back(3);
    const int a = masked_argmax(q, allowed);
    EXPECT_NE(std::find(allowed.begin(), allowed.end(), a), allowed.end());
    EXPECT_EQ(masked_argmax(q * (0.1 + 10 * uniform01(rng)), allowed), a);
  }
}

TEST(SelectTest, ExplorationIsUniformOverTheSet) {
  Rng rng(12);
  QValues q;
  q.heads = {Vector::Zero(4), Vector::Zero(4), Vector{{9.0, 0.0, 0.0, 0.0}}};
  const std::vector<int> allowed{0, 2, 3};
  std::map<int, int> freq;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++freq[select_actions(q, {allowed, allowed, allowed}, 1.0, rng)[2]];
  const double p = 1.0 / 3.0, sigma = std::sqrt(n * p * (1 - p));
  EXPECT_EQ(freq.size(), 3u);
  for (int a : allowed) EXPECT_NEAR(freq[a], n * p, 3 * sigma);
}

TEST(UpdateTest, HandComputedLinearStep) {
  QModelConfig c;
  c.state_dim = 1;
  c.hidden = {};
  c.head_sizes = {1, 1, 1};
  QModel m(c), target(c);
  Optimizer plain(OptimizerKind::kPlainGradient);
  const std::vector<Transition> ts{single({1.0f}, {0, 0, 0}, {1.0, 0.0, 0.0})};
  q_update(m, target, as_batch(ts), 0.0, 0.1, plain);
  EXPECT_DOUBLE_EQ(m.params()[m.head_weight(0)](0, 0), 0.1);
  EXPECT_DOUBLE_EQ(m.params()[m.head_weight(0) + 1](0, 0), 0.1);
  EXPECT_DOUBLE_EQ(m.params()[m.head_weight(1)](0, 0), 0.0);
}

TEST(UpdateTest, ZeroTdErrorLeavesParametersUnchanged) {
  Rng rng(3);
  QModel m = QModel::initialized(small_config(), rng);
  auto ts = oracle::random_transitions(m.config(), 8, rng);
  for (auto& t : ts) {
    t.terminal = true;
    const QValues q = forward(m, to_vector(t.state));
    for (int h = 0; h < kNumHeads; ++h) t.rewards[static_cast<std::size_t>(h)] = q[h][t.actions[static_cast<std::size_t>(h)]];
  }
  const QModel before = m;
  Optimizer plain(OptimizerKind::kPlainGradient);
  q_update(m, before, as_batch(ts), 0.9, 0.1, plain);
  for (std::size_t k = 0; k < m.params().size(); ++k) EXPECT_TRUE(m.params()[k].isApprox(before.params()[k], 1e-12));
}

TEST(UpdateTest, RmsPropZeroGradientIsNoOp) {
  Rng rng(5);
  QModel m = QModel::initialized(small_config(), rng);
  const QModel before = m;
  std::vector<Matrix> zeros;
  for (const auto& p : m.params()) zeros.push_back(Matrix::Zero(p.rows(), p.cols()));
  Optimizer rms(OptimizerKind::kRmsProp);
  rms.step(m, zeros, 0.1);
  EXPECT_EQ(m, before);
}

TEST(UpdateTest, InvalidActionIsContractViolation) {
  Rng rng(6);
  QModel m = QModel::initialized(small_config(), rng);
  auto ts = oracle::random_transitions(m.config(), 2, rng);
  ts[1].actions[2] = 6;
  Optimizer opt;
  EXPECT_THROW(q_update(m, m, as_batch(ts), 0.9, 0.01, opt), ContractViolation);
}

TEST(UpdateTest, HeadMaskKeepsOtherHeadsFixed) {
  Rng rng(7);
  QModel m = QModel::initialized(small_config(), rng);
  const QModel before = m;
  const auto ts = oracle::random_transitions(m.config(), 16, rng);
  Optimizer opt;
  q_update(m, before, as_batch(ts), 0.9, 0.01, opt, HeadMask{true, false, false});
  for (int h : {1, 2}) {
    EXPECT_EQ(m.params()[m.head_weight(h)], before.params()[m.head_weight(h)]);
    EXPECT_EQ(m.params()[m.head_weight(h) + 1], before.params()[m.head_weight(h) + 1]);
  }
  EXPECT_NE(m.params()[m.head_weight(0)], before.params()[m.head_weight(0)]);
  EXPECT_NE(m.params()[m.trunk_weight(0, 0)], before.params()[m.trunk_weight(0, 0)]);
}

TEST(GradientTest, MatchesCentralDifferences) {
  Rng rng(13);
  for (bool separate : {false, true}) {
    for (int trial = 0; trial < 5; ++trial) {
      const QModel m = QModel::initialized(small_config(32, {32, 16}, separate), rng);
      QModel target = QModel::initialized(m.config(), rng);
      const auto ts = oracle::random_transitions(m.config(), 6, rng);
      const Matrix y = td_targets(target, as_batch(ts), 0.9);
      EXPECT_LT(oracle::gradient_check(m, ts, y), 1e-4);
    }
  }
}

TEST(ConvergenceTest, SingleTransitionReachesReward) {
  Rng rng(2);
  QModel m = QModel::initialized(small_config(8, {16}), rng);
  const std::vector<Transition> ts{single(std::vector<float>(8, 0.5f), {1, 2, 3}, {1.0, -1.0, 5.0})};
  Optimizer plain(OptimizerKind::kPlainGradient);
  for (int i = 0; i < 5000; ++i) q_update(m, m, as_batch(ts), 0.0, 0.01, plain);
  const QValues q = forward(m, to_vector(ts[0].state));
  EXPECT_NEAR(q[0][1], 1.0, 1e-3);
  EXPECT_NEAR(q[1][2], -1.0, 1e-3);
  EXPECT_NEAR(q[2][3], 5.0, 1e-3);
}

TEST(ConvergenceTest, ChainPolicyMatchesValueIteration) {
  const oracle::Chain ch;
  ASSERT_EQ(ch.optimal_policy(), (std::array<int, 3>{1, 0, 0}));
  const QModel m = oracle::train_chain(ch, 1);
  EXPECT_EQ(oracle::greedy_chain_policy(m), ch.optimal_policy());
}

TEST(TargetTest, SyncOnlyAtMultiplesOfTau) {
  Rng rng(9);
  QModel online = QModel::initialized(small_config(), rng);
  QModel target = online;
  const auto ts = oracle::random_transitions(online.config(), 8, rng);
  Optimizer opt;
  const Vector probe = Vector::Random(32);
  const std::uint64_t tau = 10;
  Vector last = forward(target, probe)[2];
  for (std::uint64_t step = 1; step <= 35; ++step) {
    q_update(online, target, as_batch(ts), 0.9, 0.01, opt);
    const bool synced = sync_target(online, target, step, tau);
    EXPECT_EQ(synced, step % tau == 0);
    const Vector now = forward(target, probe)[2];
    if (synced) {
      EXPECT_EQ(target, online);
      EXPECT_NE(now, last);
    } else {
      EXPECT_EQ(now, last);
    }
    last = now;
  }
}

TEST(ReplayTest, FifoEvictionAndErrors) {
  ReplayMemory mem(2);
  Rng rng(1);
  EXPECT_THROW(mem.sample(1, rng), std::runtime_error);
  for (int i = 0; i < 3; ++i) mem.push(single({static_cast<float>(i)}, {0, 0, 0}, {0, 0, 0}));
  EXPECT_EQ(mem.size(), 2u);
  EXPECT_EQ(mem.at(0).state[0], 1.0f);
  EXPECT_EQ(mem.at(1).state[0], 2.0f);
}

TEST(ReplayTest, SampleWithoutReplacementIsPermutation) {
  ReplayMemory mem(10);
  Rng rng(2);
  for (int i = 0; i < 10; ++i) mem.push(single({static_cast<float>(i)}, {0, 0, 0}, {0, 0, 0}));
  const auto s = mem.sample(10, rng);
  std::set<float> seen;
  for (const auto* t : s) seen.insert(t->state[0]);
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(mem.sample(25, rng).size(), 25u);
}

TEST(ReplayTest, SamplingIsUniform) {
  ReplayMemory mem(20);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) mem.push(single({static_cast<float>(i)}, {0, 0, 0}, {0, 0, 0}));
  std::map<float, int> freq;
  const int rounds = 10000;
  for (int r = 0; r < rounds; ++r)
    for (const auto* t : mem.sample(1, rng)) ++freq[t->state[0]];
  const double p = 1.0 / 20, sigma = std::sqrt(rounds * p * (1 - p));
  for (const auto& [k, v] : freq) EXPECT_NEAR(v, rounds * p, 3 * sigma) << k;

  std::map<float, int> freq5;
  for (int r = 0; r < rounds; ++r)
    for (const auto* t : mem.sample(5, rng)) ++freq5[t->state[0]];
  const double p5 = 5.0 / 20;
  for (const auto& [k, v] : freq5) EXPECT_NEAR(v, rounds * p5, 3 * std::sqrt(rounds * p5 * (1 - p5))) << k;
}

TEST(CheckpointTest, RoundTripAndCorruption) {
  testing::TempDir dir;
  Rng rng(10);
  Checkpoint ck;
  ck.model = QModel::initialized(small_config(), rng);
  ck.optimizer = Optimizer(OptimizerKind::kRmsProp);
  const auto ts = oracle::random_transitions(ck.model.config(), 4, rng);
  const QModel tgt = ck.model;
  q_update(ck.model, tgt, as_batch(ts), 0.9, 0.01, ck.optimizer);
  ck.step = 42;
  ck.header = {{"variant", "vrl"}};
  save_checkpoint(ck, dir.file("m.ckpt"));
  const Checkpoint back = load_checkpoint(dir.file("m.ckpt"));
  EXPECT_EQ(back.step, 42u);
  EXPECT_EQ(back.header.at("variant"), "vrl");
  EXPECT_EQ(back.model.config(), ck.model.config());
  for (std::size_t k = 0; k < ck.model.params().size(); ++k)
    EXPECT_TRUE(back.model.params()[k].isApprox(ck.model.params()[k].cast<float>().cast<double>(), 0.0));
  EXPECT_EQ(back.optimizer.state().size(), ck.optimizer.state().size());
  EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(ck));

  const std::string bytes = read_file(dir.file("m.ckpt"));
  write_file_atomic(dir.file("t.ckpt"), bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_checkpoint(dir.file("t.ckpt")), IngestError);
}

}  // namespace
}  // namespace vrl
