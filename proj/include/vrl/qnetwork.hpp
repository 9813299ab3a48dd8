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

// Three-headed Q-network: a ReLU MLP trunk (shared, or one per head) and
// linear output heads over attribute, predicate and category slots. The
// last slot of each head is the Null / Null / Terminal action.
//
// Training is semi-gradient Q-learning. For each head h and transition i
//
//   delta = R_h + discount * max_{g' in next set} Q_target(f', g') - Q(f, g_h)
//
// (R_h alone at terminal transitions) and the loss is
// mean_i sum_h 0.5 * delta^2, differentiated with the target held fixed.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vrl/binary_io.hpp"
#include "vrl/common.hpp"

namespace vrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Head : int { kAttribute = 0, kPredicate = 1, kCategory = 2 };
inline constexpr int kNumHeads = 3;
using HeadMask = std::array<bool, kNumHeads>;
inline constexpr HeadMask kAllHeads = {true, true, true};

struct QModelConfig {
  int state_dim = 0;
  std::vector<int> hidden = {256, 256};
  std::array<int, kNumHeads> head_sizes = {1, 1, 1};
  bool separate_trunks = false;

  int num_trunks() const { return separate_trunks ? kNumHeads : 1; }
  int trunk_of(int head) const { return separate_trunks ? head : 0; }
  int trunk_out_dim() const { return hidden.empty() ? state_dim : hidden.back(); }

  nlohmann::json to_json() const {
    return {{"state_dim", state_dim}, {"hidden", hidden},
            {"head_sizes", head_sizes}, {"separate_trunks", separate_trunks}};
  }
  static QModelConfig from_json(const nlohmann::json& j) {
    QModelConfig c;
    c.state_dim = j.at("state_dim").get<int>();
    c.hidden = j.at("hidden").get<std::vector<int>>();
    c.head_sizes = j.at("head_sizes").get<std::array<int, kNumHeads>>();
    c.separate_trunks = j.at("separate_trunks").get<bool>();
    return c;
  }
  friend bool operator==(const QModelConfig&, const QModelConfig&) = default;
};

struct QValues {
  std::array<Vector, kNumHeads> heads;
  const Vector& operator[](int h) const { return heads[static_cast<std::size_t>(h)]; }
};

// Parameter tensors in a flat list. Layout: for each trunk, for each hidden
// layer, W (out x in) then b (out x 1); then for each head, W then b.
class QModel {
 public:
  QModel() = default;

  // All parameters zero.
  explicit QModel(QModelConfig cfg) : cfg_(std::move(cfg)) {
    VRL_REQUIRE(cfg_.state_dim >= 1, "state_dim must be >= 1");
    for (int s : cfg_.head_sizes) VRL_REQUIRE(s >= 1, "head sizes must be >= 1");
    for (int t = 0; t < cfg_.num_trunks(); ++t) {
      int in = cfg_.state_dim;
      for (int width : cfg_.hidden) {
        VRL_REQUIRE(width >= 1, "hidden widths must be >= 1");
        params_.push_back(Matrix::Zero(width, in));
        params_.push_back(Matrix::Zero(width, 1));
        in = width;
      }
    }
    for (int h = 0; h < kNumHeads; ++h) {
      params_.push_back(Matrix::Zero(cfg_.head_sizes[static_cast<std::size_t>(h)], cfg_.trunk_out_dim()));
      params_.push_back(Matrix::Zero(cfg_.head_sizes[static_cast<std::size_t>(h)], 1));
    }
  }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static QModel initialized(const QModelConfig& cfg, Rng& rng) {
    QModel m(cfg);
    for (std::size_t i = 0; i < m.params_.size(); i += 2) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(m.params_[i].cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (std::size_t k : {i, i + 1}) {
        Matrix& p = m.params_[k];
        for (Eigen::Index c = 0; c < p.cols(); ++c)
          for (Eigen::Index r = 0; r < p.rows(); ++r) p(r, c) = u(rng);
      }
    }
    return m;
  }

  const QModelConfig& config() const { return cfg_; }
  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }

  std::size_t trunk_weight(int trunk, int layer) const {
    return 2 * (static_cast<std::size_t>(trunk) * cfg_.hidden.size() + static_cast<std::size_t>(layer));
  }
  std::size_t head_weight(int head) const {
    return 2 * (static_cast<std::size_t>(cfg_.num_trunks()) * cfg_.hidden.size() + static_cast<std::size_t>(head));
  }

  std::size_t num_parameters() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.size());
    return n;
  }

  bool all_finite() const {
    for (const auto& p : params_)
      if (!p.allFinite()) return false;
    return true;
  }

  friend bool operator==(const QModel& a, const QModel& b) {
    if (!(a.cfg_ == b.cfg_) || a.params_.size() != b.params_.size()) return false;
    for (std::size_t i = 0; i < a.params_.size(); ++i)
      if (a.params_[i] != b.params_[i]) return false;
    return true;
  }

 private:
  QModelConfig cfg_;
  std::vector<Matrix> params_;
};

// Activations kept for backprop. Columns are samples.
struct ForwardCache {
  std::vector<std::vector<Matrix>> pre;  // [trunk][layer] pre-activations
  std::vector<std::vector<Matrix>> act;  // [trunk][0] = input, [l+1] = relu(pre[l])
  std::array<Matrix, kNumHeads> q;
};

inline ForwardCache forward_batch(const QModel& m, const Matrix& x) {
  const auto& cfg = m.config();
  if (x.rows() != cfg.state_dim) throw ContractViolation("state dimension mismatch");
  const auto& P = m.params();
  ForwardCache c;
  c.pre.resize(static_cast<std::size_t>(cfg.num_trunks()));
  c.act.resize(static_cast<std::size_t>(cfg.num_trunks()));
  for (int t = 0; t < cfg.num_trunks(); ++t) {
    auto& pre = c.pre[static_cast<std::size_t>(t)];
    auto& act = c.act[static_cast<std::size_t>(t)];
    act.push_back(x);
    for (int l = 0; l < static_cast<int>(cfg.hidden.size()); ++l) {
      const std::size_t wi = m.trunk_weight(t, l);
      Matrix z = P[wi] * act.back();
      z.colwise() += P[wi + 1].col(0);
      act.push_back(z.cwiseMax(0.0));
      pre.push_back(std::move(z));
    }
  }
  for (int h = 0; h < kNumHeads; ++h) {
    const std::size_t wi = m.head_weight(h);
    Matrix q = P[wi] * c.act[static_cast<std::size_t>(cfg.trunk_of(h))].back();
    q.colwise() += P[wi + 1].col(0);
    c.q[static_cast<std::size_t>(h)] = std::move(q);
  }
  return c;
}

inline QValues forward(const QModel& m, const Vector& f) {
  ForwardCache c = forward_batch(m, f);
  QValues out;
  for (int h = 0; h < kNumHeads; ++h) out.heads[static_cast<std::size_t>(h)] = c.q[static_cast<std::size_t>(h)].col(0);
  return out;
}

// Highest-valued slot among `allowed`; ties go to the lowest slot index.
inline int masked_argmax(const Vector& q, std::span<const int> allowed) {
  VRL_REQUIRE(!allowed.empty(), "empty action set");
  int best = -1;
  for (int a : allowed) {
    VRL_REQUIRE(a >= 0 && a < q.size(), "action slot out of range");
    if (best < 0 || q[a] > q[best] || (q[a] == q[best] && a < best)) best = a;
  }
  return best;
}

// Per head: with probability epsilon a uniform draw from the allowed set,
// otherwise the masked argmax.
inline std::array<int, kNumHeads> select_actions(const QValues& q,
                                                 const std::array<std::vector<int>, kNumHeads>& sets,
                                                 double epsilon, Rng& rng) {
  std::array<int, kNumHeads> out{};
  for (int h = 0; h < kNumHeads; ++h) {
    const auto& allowed = sets[static_cast<std::size_t>(h)];
    VRL_REQUIRE(!allowed.empty(), "empty action set");
    if (epsilon > 0.0 && uniform01(rng) < epsilon) {
      out[static_cast<std::size_t>(h)] =
          allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
    } else {
      out[static_cast<std::size_t>(h)] = masked_argmax(q[h], allowed);
    }
  }
  return out;
}

struct Transition {
  std::vector<float> state;
  std::array<int, kNumHeads> actions{};
  std::array<double, kNumHeads> rewards{};
  std::vector<float> next_state;
  std::array<std::vector<int>, kNumHeads> next_actions;  // allowed slots in the next state
  bool terminal = false;
};

inline Vector to_vector(const std::vector<float>& v) {
  return Eigen::Map<const Eigen::VectorXf>(v.data(), static_cast<Eigen::Index>(v.size())).cast<double>();
}
inline std::vector<float> to_floats(const Vector& v) {
  std::vector<float> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(v[i]);
  return out;
}

using Batch = std::span<const Transition* const>;

inline Matrix stack_states(Batch batch, int dim, bool next) {
  Matrix x(dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& s = next ? batch[i]->next_state : batch[i]->state;
    if (static_cast<int>(s.size()) != dim) throw ContractViolation("transition state dimension mismatch");
    for (int r = 0; r < dim; ++r) x(r, static_cast<Eigen::Index>(i)) = static_cast<double>(s[static_cast<std::size_t>(r)]);
  }
  return x;
}

// TD targets y (heads x batch) from the frozen target network. The max runs
// over the stored next-state action set of each head.
inline Matrix td_targets(const QModel& target, Batch batch, double discount) {
  const auto& cfg = target.config();
  Matrix y(kNumHeads, static_cast<Eigen::Index>(batch.size()));
  bool any_live = false;
  for (const auto* t : batch) any_live = any_live || !t->terminal;
  ForwardCache next;
  if (any_live && discount != 0.0) next = forward_batch(target, stack_states(batch, cfg.state_dim, true));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    for (int h = 0; h < kNumHeads; ++h) {
      double v = t.rewards[static_cast<std::size_t>(h)];
      if (!t.terminal && discount != 0.0) {
        const Vector q = next.q[static_cast<std::size_t>(h)].col(static_cast<Eigen::Index>(i));
        v += discount * q[masked_argmax(q, t.next_actions[static_cast<std::size_t>(h)])];
      }
      y(h, static_cast<Eigen::Index>(i)) = v;
    }
  }
  return y;
}

inline void check_actions(const QModelConfig& cfg, Batch batch) {
  for (const auto* t : batch)
    for (int h = 0; h < kNumHeads; ++h) {
      const int a = t->actions[static_cast<std::size_t>(h)];
      if (a < 0 || a >= cfg.head_sizes[static_cast<std::size_t>(h)])
        throw ContractViolation("action index out of range for head " + std::to_string(h));
    }
}

// mean_i sum_{h in mask} 0.5 * (y_hi - Q_h(f_i, g_hi))^2
inline double td_loss(const QModel& m, Batch batch, const Matrix& y, const HeadMask& mask = kAllHeads) {
  check_actions(m.config(), batch);
  const ForwardCache c = forward_batch(m, stack_states(batch, m.config().state_dim, false));
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (int h = 0; h < kNumHeads; ++h) {
      if (!mask[static_cast<std::size_t>(h)]) continue;
      const double d = y(h, static_cast<Eigen::Index>(i)) -
                       c.q[static_cast<std::size_t>(h)](batch[i]->actions[static_cast<std::size_t>(h)], static_cast<Eigen::Index>(i));
      loss += 0.5 * d * d;
    }
  return loss / static_cast<double>(batch.size());
}

struct TdGradient {
  std::vector<Matrix> grads;  // same layout as QModel::params()
  double loss = 0.0;
  double mean_abs_delta = 0.0;
};

inline TdGradient td_gradient(const QModel& m, Batch batch, const Matrix& y,
                              const HeadMask& mask = kAllHeads) {
  const auto& cfg = m.config();
  check_actions(cfg, batch);
  VRL_REQUIRE(!batch.empty(), "empty batch");
  const auto& P = m.params();
  const ForwardCache c = forward_batch(m, stack_states(batch, cfg.state_dim, false));
  const auto n = static_cast<Eigen::Index>(batch.size());
  const double inv_n = 1.0 / static_cast<double>(n);

  TdGradient out;
  out.grads.reserve(P.size());
  for (const auto& p : P) out.grads.push_back(Matrix::Zero(p.rows(), p.cols()));

  std::vector<Matrix> d_top(static_cast<std::size_t>(cfg.num_trunks()));
  for (auto& d : d_top) d = Matrix::Zero(cfg.trunk_out_dim(), n);
  std::size_t n_delta = 0;
  for (int h = 0; h < kNumHeads; ++h) {
    if (!mask[static_cast<std::size_t>(h)]) continue;
    Matrix dq = Matrix::Zero(cfg.head_sizes[static_cast<std::size_t>(h)], n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = batch[static_cast<std::size_t>(i)]->actions[static_cast<std::size_t>(h)];
      const double delta = y(h, i) - c.q[static_cast<std::size_t>(h)](a, i);
      out.loss += 0.5 * delta * delta * inv_n;
      out.mean_abs_delta += std::abs(delta);
      ++n_delta;
      dq(a, i) = -delta * inv_n;
    }
    const std::size_t wi = m.head_weight(h);
    const auto trunk = static_cast<std::size_t>(cfg.trunk_of(h));
    out.grads[wi] = dq * c.act[trunk].back().transpose();
    out.grads[wi + 1] = dq.rowwise().sum();
    d_top[trunk] += P[wi].transpose() * dq;
  }
  if (n_delta > 0) out.mean_abs_delta /= static_cast<double>(n_delta);

  for (int t = 0; t < cfg.num_trunks(); ++t) {
    Matrix d = std::move(d_top[static_cast<std::size_t>(t)]);
    for (int l = static_cast<int>(cfg.hidden.size()) - 1; l >= 0; --l) {
      const Matrix& z = c.pre[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)];
      d = d.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
      const std::size_t wi = m.trunk_weight(t, l);
      out.grads[wi] = d * c.act[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)].transpose();
      out.grads[wi + 1] = d.rowwise().sum();
      if (l > 0) d = P[wi].transpose() * d;
    }
  }
  return out;
}

enum class OptimizerKind { kRmsProp, kPlainGradient };

// One optimizer state shared by every parameter tensor.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, double decay = 0.95, double eps = 1e-6)
      : kind_(kind), decay_(decay), eps_(eps) {}

  // RMSProp: v <- decay * v + (1 - decay) * g^2; theta <- theta - lr * g / (sqrt(v) + eps).
  // Plain gradient: theta <- theta - lr * g.
  void step(QModel& m, const std::vector<Matrix>& grads, double lr) {
    auto& P = m.params();
    VRL_REQUIRE(grads.size() == P.size(), "gradient layout mismatch");
    if (kind_ == OptimizerKind::kPlainGradient) {
      for (std::size_t i = 0; i < P.size(); ++i) P[i] -= lr * grads[i];
      return;
    }
    if (sq_.size() != P.size()) {
      sq_.clear();
      for (const auto& p : P) sq_.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
    for (std::size_t i = 0; i < P.size(); ++i) {
      sq_[i] = decay_ * sq_[i] + (1.0 - decay_) * grads[i].cwiseProduct(grads[i]);
      P[i].array() -= lr * grads[i].array() / (sq_[i].array().sqrt() + eps_);
    }
  }

  OptimizerKind kind() const { return kind_; }
  double decay() const { return decay_; }
  double eps() const { return eps_; }
  std::vector<Matrix>& state() { return sq_; }
  const std::vector<Matrix>& state() const { return sq_; }

 private:
  OptimizerKind kind_ = OptimizerKind::kRmsProp;
  double decay_ = 0.95;
  double eps_ = 1e-6;
  std::vector<Matrix> sq_;
};

struct QUpdateStats {
  double loss = 0.0;
  double mean_abs_delta = 0.0;
};

// One semi-gradient step on the batch. Heads outside `mask` contribute no
// gradient, so their output layers are left untouched.
inline QUpdateStats q_update(QModel& online, const QModel& target, Batch batch, double discount,
                             double lr, Optimizer& opt, const HeadMask& mask = kAllHeads) {
  VRL_REQUIRE(!batch.empty(), "q_update needs a non-empty batch");
  const Matrix y = td_targets(target, batch, discount);
  TdGradient g = td_gradient(online, batch, y, mask);
  opt.step(online, g.grads, lr);
  return {g.loss, g.mean_abs_delta};
}

inline std::vector<const Transition*> as_batch(const std::vector<Transition>& ts) {
  std::vector<const Transition*> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back(&t);
  return out;
}

// Copies online into target when step is a multiple of tau. Returns whether
// a copy happened.
inline bool sync_target(const QModel& online, QModel& target, std::uint64_t step, std::uint64_t tau) {
  VRL_REQUIRE(tau >= 1, "tau must be >= 1");
  if (step % tau != 0) return false;
  target = online;
  return true;
}

// Fixed-capacity FIFO of transitions with uniform sampling.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    VRL_REQUIRE(capacity >= 1, "replay capacity must be >= 1");
    items_.reserve(std::min<std::size_t>(capacity, 4096));
  }

  void push(Transition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  // i-th oldest item.
  const Transition& at(std::size_t i) const { return items_.at((head_ + i) % items_.size()); }

  // Without replacement when n <= size, with replacement otherwise.
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const {
    if (items_.empty()) throw std::runtime_error("cannot sample from an empty replay memory");
    std::vector<const Transition*> out;
    out.reserve(n);
    const std::size_t size = items_.size();
    if (n > size) {
      std::uniform_int_distribution<std::size_t> u(0, size - 1);
      for (std::size_t i = 0; i < n; ++i) out.push_back(&items_[u(rng)]);
      return out;
    }
    // Floyd's algorithm: n distinct indices in O(n log n).
    std::set<std::size_t> chosen;
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t j = size - n; j < size; ++j) {
      const std::size_t r = std::uniform_int_distribution<std::size_t>(0, j)(rng);
      const std::size_t pick = chosen.insert(r).second ? r : (chosen.insert(j), j);
      order.push_back(pick);
    }
    for (std::size_t idx : order) out.push_back(&items_[idx]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> items_;
};

// Checkpoint file (little-endian):
//   "VRLQ" | u32 version=1 | str header_json
//   u32 n | n x tensor              (parameters)
//   u32 kind | f64 decay | f64 eps | u32 m | m x tensor   (optimizer state)
//   u64 step
// tensor := u32 rows | u32 cols | rows*cols f32 (column-major)
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json header;  // run configuration; model config lives under "model"
  QModel model;
  Optimizer optimizer;
  std::uint64_t step = 0;
};

namespace detail {
inline void put_tensor(ByteWriter& w, const Matrix& m) {
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) w.f32(static_cast<float>(m.data()[i]));
}
inline Matrix get_tensor(ByteReader& r) {
  const auto rows = static_cast<Eigen::Index>(r.u32());
  const auto cols = static_cast<Eigen::Index>(r.u32());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(r.f32());
  return m;
}
}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ck) {
  ByteWriter w;
  w.bytes("VRLQ");
  w.u32(kCheckpointVersion);
  nlohmann::json header = ck.header;
  header["model"] = ck.model.config().to_json();
  w.str(header.dump());
  w.u32(static_cast<std::uint32_t>(ck.model.params().size()));
  for (const auto& p : ck.model.params()) detail::put_tensor(w, p);
  w.u32(ck.optimizer.kind() == OptimizerKind::kRmsProp ? 0u : 1u);
  w.f64(ck.optimizer.decay());
  w.f64(ck.optimizer.eps());
  w.u32(static_cast<std::uint32_t>(ck.optimizer.state().size()));
  for (const auto& p : ck.optimizer.state()) detail::put_tensor(w, p);
  w.u64(ck.step);
  return w.data();
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  write_file_atomic(path, serialize_checkpoint(ck));
}

inline Checkpoint load_checkpoint(const std::string& path) {
  const std::string data = read_file(path);
  ByteReader r(data, path);
  if (r.bytes(4) != "VRLQ") throw IngestError(path + ": not a model checkpoint");
  if (r.u32() != kCheckpointVersion) throw IngestError(path + ": unsupported checkpoint version");
  Checkpoint ck;
  try {
    ck.header = nlohmann::json::parse(r.str());
    ck.model = QModel(QModelConfig::from_json(ck.header.at("model")));
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(path + ": bad checkpoint header: " + e.what());
  }
  const std::uint32_t n = r.u32();
  auto& P = ck.model.params();
  if (n != P.size()) throw IngestError(path + ": parameter count does not match header");
  for (auto& p : P) {
    Matrix m = detail::get_tensor(r);
    if (m.rows() != p.rows() || m.cols() != p.cols())
      throw IngestError(path + ": parameter shape does not match header");
    p = std::move(m);
  }
  const std::uint32_t kind = r.u32();
  const double decay = r.f64();
  const double eps = r.f64();
  ck.optimizer = Optimizer(kind == 0 ? OptimizerKind::kRmsProp : OptimizerKind::kPlainGradient, decay, eps);
  const std::uint32_t m = r.u32();
  for (std::uint32_t i = 0; i < m; ++i) ck.optimizer.state().push_back(detail::get_tensor(r));
  ck.step = r.u64();
  if (!r.done()) throw IngestError(path + ": trailing bytes in checkpoint");
  return ck;
}

}  // namespace vrl
