#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "april/common.hpp"
#include "april/corpus.hpp"
#include "april/mlp.hpp"
#include "april/querier.hpp"
#include "april/summary_db.hpp"

namespace april {

// ---------------------------------------------------------------------------
// Episodic MDP

enum class Phase { building, terminal, absorbing };

struct MdpState {
  std::vector<int> draft;
  int token_count = 0;
  Phase phase = Phase::building;

  bool contains(int sentence) const {
    return std::find(draft.begin(), draft.end(), sentence) != draft.end();
  }
  static MdpState absorbing() { return {{}, 0, Phase::absorbing}; }
};

struct Action {
  enum class Kind { add_sentence, terminate };
  Kind kind = Kind::terminate;
  int sentence = -1;

  static Action add(int id) { return {Kind::add_sentence, id}; }
  static Action terminate() { return {Kind::terminate, -1}; }
  bool operator==(const Action&) const = default;
};

/// Terminate first, then every unused sentence in id order. Additions that
/// overflow the length limit are legal; they lead to a terminal state.
inline std::vector<Action> legal_actions(const MdpState& state, const DocumentCluster& cluster) {
  require(state.phase == Phase::building, ErrorCode::invalid_argument,
          "no actions are available from a terminal or absorbing state");
  std::vector<Action> out{Action::terminate()};
  for (int i = 0; i < cluster.size(); ++i) {
    if (!state.contains(i)) out.push_back(Action::add(i));
  }
  return out;
}

inline MdpState step(const MdpState& state, const Action& action, const DocumentCluster& cluster) {
  require(state.phase == Phase::building, ErrorCode::invalid_argument,
          "cannot step from a terminal or absorbing state");
  if (action.kind == Action::Kind::terminate) return MdpState::absorbing();
  require(action.sentence >= 0 && action.sentence < cluster.size() &&
              !state.contains(action.sentence),
          ErrorCode::invalid_argument,
          "illegal action: add_sentence(" + std::to_string(action.sentence) + ")");
  MdpState next = state;
  next.draft.push_back(action.sentence);
  next.token_count += cluster.token_count(action.sentence);
  if (next.token_count > cluster.length_limit) next.phase = Phase::terminal;
  return next;
}

/// states[i] is the state reached by actions[i]; the empty start state is
/// implicit.
struct Trajectory {
  std::vector<MdpState> states;
  std::vector<Action> actions;

  /// Draft of the last building state (the summary being scored).
  const std::vector<int>& final_draft() const {
    static const std::vector<int> empty;
    for (auto it = states.rbegin(); it != states.rend(); ++it) {
      if (it->phase != Phase::absorbing) return it->draft;
    }
    return empty;
  }
};

/// The add-then-terminate path of a finished summary: k building states, then s_T.
inline Trajectory replay_trajectory(const std::vector<int>& sentence_ids,
                                    const DocumentCluster& cluster) {
  Trajectory t;
  MdpState s;
  for (int id : sentence_ids) {
    t.actions.push_back(Action::add(id));
    s = step(s, t.actions.back(), cluster);
    t.states.push_back(s);
  }
  t.actions.push_back(Action::terminate());
  t.states.push_back(step(s, Action::terminate(), cluster));
  return t;
}

using RewardFn = std::function<double(const std::vector<int>&)>;

/// One reward per action. Only the terminate action pays, reward_fn of the
/// draft it closes; an overflow into a terminal state ends the episode with 0.
inline std::vector<double> emitted_rewards(const Trajectory& t, const RewardFn& reward_fn) {
  require(!t.states.empty() && t.states.size() == t.actions.size(), ErrorCode::invalid_argument,
          "malformed trajectory");
  require(t.states.back().phase != Phase::building, ErrorCode::invalid_argument,
          "trajectory has not terminated");
  std::vector<double> r(t.actions.size(), 0.0);
  if (t.actions.back().kind == Action::Kind::terminate) r.back() = reward_fn(t.final_draft());
  return r;
}

inline double reward_of(const Trajectory& t, const RewardFn& reward_fn) {
  double total = 0.0;
  for (double r : emitted_rewards(t, reward_fn)) total += r;
  return total;
}

// ---------------------------------------------------------------------------
// State features

/// Unnormalized bigram counts of a draft; phi() gives the L2-normalized
/// vector (same representation as complete summaries).
class DraftCounts {
 public:
  explicit DraftCounts(const FeatureSpace& space) : space_(&space), counts_(Vector::Zero(space.dim())) {}

  void add(int sentence) {
    for (int f : space_->sentence_features(sentence)) counts_[f] += 1.0;
  }

  Vector phi() const { return normalized(counts_); }

  Vector phi_with(int sentence) const {
    Vector c = counts_;
    for (int f : space_->sentence_features(sentence)) c[f] += 1.0;
    return normalized(c);
  }

 private:
  static Vector normalized(Vector v) {
    const double n = v.norm();
    if (n > 0.0) v /= n;
    return v;
  }

  const FeatureSpace* space_;
  Vector counts_;
};

/// Columns phi(s_1) .. phi(s_k) for the prefixes of a summary.
inline Matrix prefix_features(const std::vector<int>& sentence_ids, const FeatureSpace& space) {
  Matrix out(space.dim(), static_cast<Eigen::Index>(sentence_ids.size()));
  DraftCounts counts(space);
  for (std::size_t i = 0; i < sentence_ids.size(); ++i) {
    counts.add(sentence_ids[i]);
    out.col(static_cast<Eigen::Index>(i)) = counts.phi();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Value models

struct RlConfig {
  int episodes = 3000;  // T
  int sync_period = 50;  // C
  double lr = 1e-3;
  AdamConfig adam{};
  double grad_clip = 10.0;
  int hidden = 100;
  std::uint64_t seed = 0;

  void validate() const {
    require(episodes >= 1, ErrorCode::invalid_argument, "episodes T must be >= 1");
    require(sync_period >= 1, ErrorCode::invalid_argument, "sync period C must be >= 1");
    require(lr > 0.0, ErrorCode::invalid_argument, "learning rate must be positive");
    require(hidden >= 1, ErrorCode::invalid_argument, "hidden width must be >= 1");
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "episodes=" << episodes << ";sync=" << sync_period << ";lr=" << lr
       << ";b1=" << adam.beta1 << ";b2=" << adam.beta2 << ";eps=" << adam.eps
       << ";clip=" << grad_clip << ";hidden=" << hidden << ";seed=" << seed;
    return os.str();
  }
  std::uint64_t hash() const { return fnv1a(describe()); }
};

struct LinearValueModel {
  Vector theta;

  double value(const Vector& phi) const { return theta.dot(phi); }
  Vector values(const Matrix& phis) const { return phis.transpose() * theta; }
  double absorbing_value() const { return 0.0; }
};

struct NeuralValueModel {
  Mlp theta;
  Mlp theta_prime;
  Adam adam;

  double value(const Vector& phi) const { return theta.value(phi); }
  Vector values(const Matrix& phis) const { return theta.forward(phis); }
  double absorbing_value() const { return 0.0; }
};

namespace detail {

inline void check_training_inputs(const SummaryDB& db, std::span<const double> rewards) {
  require(db.size() >= 1, ErrorCode::invalid_argument, "summary DB is empty");
  require(rewards.size() == static_cast<std::size_t>(db.size()), ErrorCode::invalid_argument,
          "one reward per DB summary is required");
}

/// Replay draw: y ~ softmax(V) over the DB.
template <typename Rng>
int replay_sample(const Vector& values, Rng& rng) {
  const auto p = softmax(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
  std::discrete_distribution<int> pick(p.begin(), p.end());
  return pick(rng);
}

}  // namespace detail

/// Linear TD(0) over replayed DB summaries; `rewards[i]` is the terminal
/// reward of summary i.
inline LinearValueModel train_td(const SummaryDB& db, const FeatureSpace& space,
                                 std::span<const double> rewards, const RlConfig& cfg) {
  cfg.validate();
  detail::check_training_inputs(db, rewards);
  std::mt19937_64 rng(derive_seed(cfg.seed, "td"));
  LinearValueModel m{Vector::Zero(space.dim())};
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const int y = detail::replay_sample(m.values(db.features), rng);
    const auto& ids = db.at(y).sentence_ids;
    if (ids.empty()) continue;
    const Matrix states = prefix_features(ids, space);
    const Eigen::Index k = states.cols();
    for (Eigen::Index i = 0; i < k; ++i) {
      const double target = i + 1 < k ? m.value(states.col(i + 1)) : rewards[static_cast<std::size_t>(y)];
      const double err = target - m.value(states.col(i));
      m.theta += cfg.lr * err * states.col(i);
    }
  }
  return m;
}

/// Least-squares TD statistics: A = A0 + sum phi (phi - phi')^T, b = sum r phi.
class LstdAccumulator {
 public:
  explicit LstdAccumulator(Matrix a0) : a_(std::move(a0)), b_(Vector::Zero(a_.rows())) {}

  /// Diagonal start with entries drawn from U(0,1).
  template <typename Rng>
  static LstdAccumulator random_diagonal(int dim, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix a = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) a(i, i) = u(rng);
    return LstdAccumulator(std::move(a));
  }

  /// `next` is the successor's features; pass a zero vector for s_T.
  void add(const Vector& phi, const Vector& next, double reward) {
    a_.noalias() += phi * (phi - next).transpose();
    b_.noalias() += reward * phi;
  }

  Vector solve() const {
    Eigen::ColPivHouseholderQR<Matrix> qr(a_);
    require(qr.rank() == a_.rows(), ErrorCode::singular_system,
            "LSTD system is singular (rank " + std::to_string(qr.rank()) + " of " +
                std::to_string(a_.rows()) + ")");
    Vector theta = qr.solve(b_);
    require(theta.allFinite(), ErrorCode::non_finite, "LSTD solution is not finite");
    return theta;
  }

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }

 private:
  Matrix a_;
  Vector b_;
};

/// LSTD over the same replay scheme; theta used for sampling is refreshed
/// every C episodes.
inline LinearValueModel train_lstd(const SummaryDB& db, const FeatureSpace& space,
                                   std::span<const double> rewards, const RlConfig& cfg) {
  cfg.validate();
  detail::check_training_inputs(db, rewards);
  std::mt19937_64 rng(derive_seed(cfg.seed, "lstd"));
  auto acc = LstdAccumulator::random_diagonal(space.dim(), rng);
  LinearValueModel m{Vector::Zero(space.dim())};
  const Vector zero = Vector::Zero(space.dim());
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const int y = detail::replay_sample(m.values(db.features), rng);
    const auto& ids = db.at(y).sentence_ids;
    if (!ids.empty()) {
      const Matrix states = prefix_features(ids, space);
      const Eigen::Index k = states.cols();
      for (Eigen::Index i = 0; i + 1 < k; ++i) acc.add(states.col(i), states.col(i + 1), 0.0);
      acc.add(states.col(k - 1), zero, rewards[static_cast<std::size_t>(y)]);
    }
    if ((ep + 1) % cfg.sync_period == 0) m.theta = acc.solve();
  }
  m.theta = acc.solve();
  return m;
}

struct NtdHooks {
  /// Called after every episode's optimizer step (and any sync).
  std::function<void(int episode, double loss, const NeuralValueModel&)> on_episode;
};

inline NeuralValueModel make_neural_model(int input_dim, const RlConfig& cfg, std::uint64_t seed) {
  NeuralValueModel m;
  m.theta = Mlp({input_dim, cfg.hidden, cfg.hidden, 1});
  std::mt19937_64 rng(seed);
  m.theta.init(rng);
  m.theta_prime = m.theta;
  m.adam = Adam(m.theta.params().size(), AdamConfig{cfg.lr, cfg.adam.beta1, cfg.adam.beta2, cfg.adam.eps});
  return m;
}

/// Neural TD with softmax replay from the DB and a frozen target network
/// refreshed every C episodes. theta is initialized once, before the loop.
inline NeuralValueModel train_ntd(const SummaryDB& db, const FeatureSpace& space,
                                  std::span<const double> rewards, const RlConfig& cfg,
                                  const NtdHooks& hooks = {}) {
  cfg.validate();
  detail::check_training_inputs(db, rewards);
  NeuralValueModel m = make_neural_model(space.dim(), cfg, derive_seed(cfg.seed, "ntd-init"));
  std::mt19937_64 rng(derive_seed(cfg.seed, "ntd"));
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const int y = detail::replay_sample(m.theta.forward(db.features), rng);
    const auto& ids = db.at(y).sentence_ids;
    double loss = 0.0;
    if (!ids.empty()) {
      const Matrix states = prefix_features(ids, space);
      const Eigen::Index k = states.cols();
      Vector targets(k);
      if (k > 1) targets.head(k - 1) = m.theta_prime.forward(states.rightCols(k - 1));
      targets[k - 1] = rewards[static_cast<std::size_t>(y)];
      const Vector err = targets - m.theta.forward(states);
      loss = err.squaredNorm();
      Vector grad = m.theta.backward(states, -2.0 * err);
      const double gnorm = grad.norm();
      if (!std::isfinite(loss) || !std::isfinite(gnorm)) {
        std::ostringstream os;
        os << "NTD diverged at episode " << ep << ": loss=" << loss << " grad_norm=" << gnorm;
        throw Error(ErrorCode::non_finite, os.str());
      }
      if (gnorm > cfg.grad_clip) grad *= cfg.grad_clip / gnorm;
      m.adam.step(m.theta.params(), grad);
    }
    if ((ep + 1) % cfg.sync_period == 0) m.theta_prime = m.theta;
    if (hooks.on_episode) hooks.on_episode(ep, loss, m);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Policy derivation

enum class PolicyMode { greedy, softmax };

/// Candidate moves from a building state that keep the summary legal, with
/// the value of each successor. Entry 0 is terminate, valued at V(s_T).
struct ActionValues {
  std::vector<Action> actions;
  std::vector<double> values;
};

template <typename Model>
ActionValues action_values(const Model& model, const MdpState& state,
                           const DocumentCluster& cluster, const FeatureSpace& space) {
  ActionValues av;
  av.actions.push_back(Action::terminate());
  av.values.push_back(model.absorbing_value());
  DraftCounts counts(space);
  for (int id : state.draft) counts.add(id);
  std::vector<int> adds;
  for (const auto& a : legal_actions(state, cluster)) {
    if (a.kind == Action::Kind::add_sentence &&
        state.token_count + cluster.token_count(a.sentence) <= cluster.length_limit)
      adds.push_back(a.sentence);
  }
  if (adds.empty()) return av;
  Matrix phis(space.dim(), static_cast<Eigen::Index>(adds.size()));
  for (std::size_t j = 0; j < adds.size(); ++j) phis.col(static_cast<Eigen::Index>(j)) = counts.phi_with(adds[j]);
  const Vector v = model.values(phis);
  for (std::size_t j = 0; j < adds.size(); ++j) {
    av.actions.push_back(Action::add(adds[j]));
    av.values.push_back(v[static_cast<Eigen::Index>(j)]);
  }
  return av;
}

/// Rolls out the policy from the empty draft. Greedy takes the first
/// argmax (terminate wins ties); softmax samples exp(V) of the successors.
template <typename Model, typename Rng>
std::vector<int> derive_policy(const Model& model, const DocumentCluster& cluster,
                               const FeatureSpace& space, PolicyMode mode, Rng& rng) {
  MdpState s;
  while (true) {
    const auto av = action_values(model, s, cluster, space);
    std::size_t pick = 0;
    if (mode == PolicyMode::greedy) {
      for (std::size_t j = 1; j < av.values.size(); ++j) {
        if (av.values[j] > av.values[pick]) pick = j;
      }
    } else {
      const auto p = softmax(std::span<const double>(av.values));
      std::discrete_distribution<std::size_t> d(p.begin(), p.end());
      pick = d(rng);
    }
    if (av.actions[pick].kind == Action::Kind::terminate) return s.draft;
    s = step(s, av.actions[pick], cluster);
  }
}

template <typename Model>
std::vector<int> derive_greedy(const Model& model, const DocumentCluster& cluster,
                               const FeatureSpace& space) {
  std::mt19937_64 unused(0);
  return derive_policy(model, cluster, space, PolicyMode::greedy, unused);
}

// ---------------------------------------------------------------------------
// Exhaustive optimum for tiny clusters

struct BruteForceOptions {
  bool order_insensitive = true;
  std::uint64_t guard = 1'000'000;
};

struct BruteForceResult {
  std::vector<int> sentence_ids;
  double reward = -std::numeric_limits<double>::infinity();
  std::uint64_t evaluated = 0;
};

namespace detail {

inline std::uint64_t factorial_capped(std::size_t k, std::uint64_t cap) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= k && f <= cap; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Best non-empty legal summary. Subsets are visited in lexicographic order
/// and only a strictly better reward replaces the incumbent, so ties resolve
/// to the lexicographically smallest id set.
inline BruteForceResult brute_force_best(const DocumentCluster& cluster, const RewardFn& reward_fn,
                                         BruteForceOptions opt = {}) {
  const int n = cluster.size();
  const int limit = cluster.length_limit;

  // Count first so an oversized instance fails before any scoring.
  std::uint64_t count = 0;
  std::vector<int> cur;
  std::function<void(int, int)> count_dfs = [&](int start, int tokens) {
    for (int i = start; i < n && count <= opt.guard; ++i) {
      if (tokens + cluster.token_count(i) > limit) continue;
      cur.push_back(i);
      count += opt.order_insensitive ? 1 : detail::factorial_capped(cur.size(), opt.guard);
      count_dfs(i + 1, tokens + cluster.token_count(i));
      cur.pop_back();
    }
  };
  count_dfs(0, 0);
  require(count <= opt.guard, ErrorCode::guard_exceeded,
          "more than " + std::to_string(opt.guard) +
              " legal summaries; shrink the cluster or raise the length limit guard");
  require(count > 0, ErrorCode::invalid_argument, "no sentence fits the length limit");

  BruteForceResult best;
  std::function<void(int, int)> dfs = [&](int start, int tokens) {
    for (int i = start; i < n; ++i) {
      if (tokens + cluster.token_count(i) > limit) continue;
      cur.push_back(i);
      if (opt.order_insensitive) {
        const double r = reward_fn(cur);
        ++best.evaluated;
        if (r > best.reward) {
          best.reward = r;
          best.sentence_ids = cur;
        }
      } else {
        auto perm = cur;
        do {
          const double r = reward_fn(perm);
          ++best.evaluated;
          if (r > best.reward) {
            best.reward = r;
            best.sentence_ids = perm;
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
      dfs(i + 1, tokens + cluster.token_count(i));
      cur.pop_back();
    }
  };
  dfs(0, 0);
  return best;
}

// ---------------------------------------------------------------------------
// Model persistence
//
// Layout (all integers unsigned little-endian, reals IEEE-754 binary64 LE):
//   8 bytes  magic "APRILVAL"
//   u32      format version (1)
//   u32      kind (1 = linear, 2 = neural)
//   u32      layer-size count L, then L x u32 sizes (linear: L = 1, the dim)
//   u64      config hash
//   u64      parameter count P, then P x f64 parameters

enum class ModelKind : std::uint32_t { linear = 1, neural = 2 };

struct StoredModel {
  ModelKind kind = ModelKind::linear;
  std::vector<int> sizes;
  std::uint64_t config_hash = 0;
  Vector params;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xffu);
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xffu);
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}
  std::uint64_t get(int bytes) {
    require(pos_ + static_cast<std::size_t>(bytes) <= data_.size(), ErrorCode::db_format,
            "model file truncated at byte offset " + std::to_string(pos_));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::string_view take(std::size_t n) {
    require(pos_ + n <= data_.size(), ErrorCode::db_format, "model file truncated");
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_model(const StoredModel& m) {
  std::string out = "APRILVAL";
  detail::put_u32(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(m.kind));
  detail::put_u32(out, static_cast<std::uint32_t>(m.sizes.size()));
  for (int s : m.sizes) detail::put_u32(out, static_cast<std::uint32_t>(s));
  detail::put_u64(out, m.config_hash);
  detail::put_u64(out, static_cast<std::uint64_t>(m.params.size()));
  for (Eigen::Index i = 0; i < m.params.size(); ++i) {
    std::uint64_t bits = 0;
    const double x = m.params[i];
    std::memcpy(&bits, &x, sizeof bits);
    detail::put_u64(out, bits);
  }
  return out;
}

inline StoredModel parse_model(std::string_view data) {
  detail::ByteReader r(data);
  require(r.take(8) == "APRILVAL", ErrorCode::db_format, "not a value-model file");
  require(r.get(4) == 1, ErrorCode::db_format, "unsupported model format version");
  StoredModel m;
  const auto kind = r.get(4);
  require(kind == 1 || kind == 2, ErrorCode::db_format, "unknown model kind");
  m.kind = static_cast<ModelKind>(kind);
  const auto layers = r.get(4);
  require(layers >= 1 && layers <= 64, ErrorCode::db_format, "bad layer count");
  for (std::uint64_t i = 0; i < layers; ++i) m.sizes.push_back(static_cast<int>(r.get(4)));
  m.config_hash = r.get(8);
  const auto count = r.get(8);
  require(count <= data.size() / 8, ErrorCode::db_format, "parameter count exceeds file size");
  m.params.resize(static_cast<Eigen::Index>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t bits = r.get(8);
    double x = 0.0;
    std::memcpy(&x, &bits, sizeof x);
    m.params[static_cast<Eigen::Index>(i)] = x;
  }
  require(r.done(), ErrorCode::db_format, "trailing bytes after model parameters");
  return m;
}

inline StoredModel store(const LinearValueModel& m, std::uint64_t config_hash) {
  return {ModelKind::linear, {static_cast<int>(m.theta.size())}, config_hash, m.theta};
}

inline StoredModel store(const NeuralValueModel& m, std::uint64_t config_hash) {
  return {ModelKind::neural, m.theta.sizes(), config_hash, m.theta.params()};
}

inline LinearValueModel restore_linear(const StoredModel& s) {
  require(s.kind == ModelKind::linear && s.sizes.size() == 1 &&
              s.params.size() == s.sizes[0],
          ErrorCode::db_format, "stored model is not a linear value model");
  return {s.params};
}

inline NeuralValueModel restore_neural(const StoredModel& s) {
  require(s.kind == ModelKind::neural, ErrorCode::db_format, "stored model is not a neural value model");
  NeuralValueModel m;
  m.theta = Mlp(s.sizes);
  require(m.theta.params().size() == s.params.size(), ErrorCode::db_format,
          "parameter count does not match the layer sizes");
  m.theta.params() = s.params;
  m.theta_prime = m.theta;
  m.adam = Adam(s.params.size(), AdamConfig{});
  return m;
}

inline void write_model(const StoredModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path.string());
  const std::string bytes = serialize_model(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline StoredModel read_model(const std::filesystem::path& path) {
  return parse_model(detail::read_file(path));
}

}  // namespace april
