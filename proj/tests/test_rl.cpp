#include <gtest/gtest.h>

#include <random>

#include "april/rl.hpp"
#include "fixtures.hpp"

using namespace april;

namespace {

RlConfig small_cfg(int episodes, std::uint64_t seed) {
  RlConfig c;
  c.episodes = episodes;
  c.seed = seed;
  c.hidden = 16;
  return c;
}

}  // namespace

TEST(Mdp, LegalActionsTerminateFirstThenUnusedIds) {
  const auto c = fixtures::lines_cluster({"a b", "c d", "e f"}, {}, 10);
  MdpState s;
  s = step(s, Action::add(1), c);
  const auto a = legal_actions(s, c);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0], Action::terminate());
  EXPECT_EQ(a[1], Action::add(0));
  EXPECT_EQ(a[2], Action::add(2));
}

TEST(Mdp, OverflowIsTerminalAndTerminateIsAbsorbing) {
  const auto c = fixtures::lines_cluster({"a b c", "d e f"}, {}, 4);
  MdpState s = step(MdpState{}, Action::add(0), c);
  EXPECT_EQ(s.phase, Phase::building);
  const MdpState over = step(s, Action::add(1), c);
  EXPECT_EQ(over.phase, Phase::terminal);
  EXPECT_THROW(legal_actions(over, c), Error);
  EXPECT_EQ(step(s, Action::terminate(), c).phase, Phase::absorbing);
  EXPECT_THROW(step(s, Action::add(0), c), Error);
  EXPECT_THROW(step(s, Action::add(9), c), Error);
}

TEST(Mdp, ReplayTrajectoryHasKBuildingStatesThenAbsorbing) {
  const auto c = fixtures::random_cluster(8, 2, 100);
  const auto t = replay_trajectory({4, 1, 6}, c);
  ASSERT_EQ(t.states.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(t.states[i].draft.size(), static_cast<std::size_t>(i + 1));
  EXPECT_EQ(t.states.back().phase, Phase::absorbing);
  EXPECT_EQ(t.final_draft(), (std::vector<int>{4, 1, 6}));
}

TEST(Mdp, RewardIsDelayedToTerminateAndZeroOnOverflow) {
  const auto c = fixtures::lines_cluster({"a b c", "d e f", "g h"}, {}, 5);
  const RewardFn r = [](const std::vector<int>& d) { return 1.0 + static_cast<double>(d.size()); };
  const auto t = replay_trajectory({0, 2}, c);
  const auto rs = emitted_rewards(t, r);
  EXPECT_EQ(rs, (std::vector<double>{0.0, 0.0, 3.0}));
  Trajectory over;
  MdpState s = step(MdpState{}, Action::add(0), c);
  over.actions = {Action::add(0), Action::add(1)};
  over.states = {s, step(s, Action::add(1), c)};
  EXPECT_EQ(reward_of(over, r), 0.0);
}

TEST(Features, PrefixFeaturesMatchFeaturize) {
  const auto c = fixtures::random_cluster(8, 3, 100);
  const auto space = build_feature_space(c, 40);
  const std::vector<int> ids{5, 0, 3};
  const Matrix p = prefix_features(ids, space);
  for (int k = 1; k <= 3; ++k) {
    const Vector want = featurize(std::vector<int>(ids.begin(), ids.begin() + k), c, space);
    EXPECT_LE((p.col(k - 1) - want).norm(), 1e-12);
  }
}

TEST(Replay, UniformAtZeroValues) {
  std::mt19937_64 rng(1);
  const Vector v = Vector::Zero(10);
  std::vector<int> counts(10, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(detail::replay_sample(v, rng))];
  double chi2 = 0.0;
  for (int x : counts) chi2 += (x - n / 10.0) * (x - n / 10.0) / (n / 10.0);
  // 9 degrees of freedom, 0.999 quantile is 27.88.
  EXPECT_LT(chi2, 27.88);
}

TEST(Td, ZeroRewardsKeepZeroWeights) {
  const auto c = fixtures::random_cluster(10, 4);
  const auto space = build_feature_space(c, 30);
  const auto db = generate_db(c, space, 40, 4);
  const std::vector<double> r(40, 0.0);
  EXPECT_EQ(train_td(db, space, r, small_cfg(300, 1)).theta.norm(), 0.0);
}

TEST(Td, RejectsMismatchedRewards) {
  const auto c = fixtures::random_cluster(10, 4);
  const auto space = build_feature_space(c, 30);
  const auto db = generate_db(c, space, 40, 4);
  EXPECT_THROW(train_td(db, space, std::vector<double>(3, 0.0), small_cfg(10, 1)), Error);
  auto bad = small_cfg(0, 1);
  EXPECT_THROW(train_td(db, space, std::vector<double>(40, 0.0), bad), Error);
}

TEST(Lstd, TwoStateChainConvergesToReward) {
  const auto c = fixtures::lines_cluster({"a b c", "d e f"}, {}, 100);
  const auto space = build_feature_space(c, 10);
  const auto db = fixtures::db_from({{0, 1}, {0, 1}}, c, space);
  const std::vector<double> r{4.0, 4.0};
  const auto m = train_lstd(db, space, r, small_cfg(4000, 2));
  const Matrix states = prefix_features({0, 1}, space);
  EXPECT_NEAR(m.value(states.col(1)), 4.0, 0.02);
  EXPECT_NEAR(m.value(states.col(0)), 4.0, 0.02);
}

TEST(Lstd, ZeroRewardAndDeterminism) {
  const auto c = fixtures::random_cluster(10, 5);
  const auto space = build_feature_space(c, 30);
  const auto db = generate_db(c, space, 40, 5);
  EXPECT_LE(train_lstd(db, space, std::vector<double>(40, 0.0), small_cfg(100, 3)).theta.norm(), 1e-12);
  std::vector<double> r(40);
  for (int i = 0; i < 40; ++i) r[i] = i % 7;
  const auto a = train_lstd(db, space, r, small_cfg(200, 3));
  const auto b = train_lstd(db, space, r, small_cfg(200, 3));
  EXPECT_EQ(a.theta, b.theta);
}

TEST(Lstd, AccumulatorMatchesHandUpdate) {
  LstdAccumulator acc(Matrix::Identity(2, 2));
  Vector p(2), q(2);
  p << 1, 0;
  q << 0, 1;
  acc.add(p, q, 0.0);
  acc.add(q, Vector::Zero(2), 3.0);
  Matrix a(2, 2);
  a << 2, -1, 0, 2;
  EXPECT_EQ(acc.a(), a);
  EXPECT_EQ(acc.b(), (Vector(2) << 0, 3).finished());
  const Vector theta = acc.solve();
  EXPECT_LE((a * theta - acc.b()).norm(), 1e-12);
  EXPECT_THROW(LstdAccumulator(Matrix::Zero(2, 2)).solve(), Error);
}

TEST(BruteForce, SingleSentenceCluster) {
  const auto c = fixtures::lines_cluster({"only one here"}, {}, 10);
  const auto best = brute_force_best(c, [](const std::vector<int>&) { return 1.0; });
  EXPECT_EQ(best.sentence_ids, std::vector<int>{0});
  EXPECT_EQ(best.evaluated, 1u);
}

TEST(BruteForce, AdditiveRewardMatchesKnapsackDp) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = fixtures::random_cluster(10, rng(), 30, 2, 10);
    std::vector<double> value(10);
    for (auto& v : value) v = std::uniform_real_distribution<double>(0, 5)(rng);
    const RewardFn r = [&](const std::vector<int>& ids) {
      double s = 0;
      for (int i : ids) s += value[static_cast<std::size_t>(i)];
      return s;
    };
    std::vector<double> dp(31, 0.0);
    for (int i = 0; i < 10; ++i)
      for (int cap = 30; cap >= c.token_count(i); --cap)
        dp[cap] = std::max(dp[cap], dp[cap - c.token_count(i)] + value[i]);
    EXPECT_NEAR(brute_force_best(c, r).reward, dp[30], 1e-12);
  }
}

TEST(BruteForce, PlantedOptimumAndGuard) {
  const auto c = fixtures::lines_cluster({"a b", "c d", "e f", "g h", "i j"}, {}, 4);
  const RewardFn r = [](const std::vector<int>& ids) {
    auto s = ids;
    std::sort(s.begin(), s.end());
    return s == std::vector<int>{1, 3} ? 10.0 : static_cast<double>(s.size());
  };
  EXPECT_EQ(brute_force_best(c, r).sentence_ids, (std::vector<int>{1, 3}));
  EXPECT_EQ(brute_force_best(c, r, {false, 1000}).reward, 10.0);
  try {
    brute_force_best(c, r, {true, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::guard_exceeded);
  }
}

TEST(Policy, GreedyFollowsLinearValuesAndStopsWhenNothingHelps) {
  const auto c = fixtures::lines_cluster({"a b", "c d", "e f"}, {}, 4);
  const auto space = build_feature_space(c, 10);
  LinearValueModel m{Vector::Zero(space.dim())};
  // Zero values everywhere: terminate wins the tie immediately.
  EXPECT_TRUE(derive_greedy(m, c, space).empty());
  m.theta[*space.index_of({"c", "d"})] = 1.0;
  m.theta[*space.index_of({"e", "f"})] = 0.5;
  EXPECT_EQ(derive_greedy(m, c, space), (std::vector<int>{1, 2}));
}

TEST(Policy, NeverExceedsLengthLimit) {
  const auto c = fixtures::random_cluster(12, 7, 25);
  const auto space = build_feature_space(c, 40);
  LinearValueModel m{Vector::Ones(space.dim())};
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto ids = derive_policy(m, c, space, PolicyMode::softmax, rng);
    int tokens = 0;
    for (int i : ids) tokens += c.token_count(i);
    EXPECT_LE(tokens, 25);
  }
}

TEST(Ntd, TargetNetworkOnlyChangesAtSync) {
  const auto c = fixtures::random_cluster(10, 8);
  const auto space = build_feature_space(c, 30);
  const auto db = generate_db(c, space, 40, 8);
  std::vector<double> r(40);
  for (int i = 0; i < 40; ++i) r[i] = i % 5;
  auto cfg = small_cfg(60, 4);
  cfg.sync_period = 20;
  Vector last_target;
  int changes = 0;
  NtdHooks hooks;
  hooks.on_episode = [&](int ep, double, const NeuralValueModel& m) {
    if (last_target.size() && m.theta_prime.params() != last_target) {
      ++changes;
      EXPECT_EQ((ep + 1) % 20, 0) << ep;
    }
    if ((ep + 1) % 20 == 0) EXPECT_EQ(m.theta_prime.params(), m.theta.params());
    last_target = m.theta_prime.params();
  };
  train_ntd(db, space, r, cfg, hooks);
  EXPECT_EQ(changes, 3);
}

TEST(Ntd, LossDecreasesOverTraining) {
  const auto c = fixtures::random_cluster(10, 9);
  const auto space = build_feature_space(c, 30);
  const auto db = generate_db(c, space, 60, 9);
  std::vector<double> r(60);
  for (int i = 0; i < 60; ++i) r[i] = (i * 13 % 60) / 6.0;
  double early = 0, late = 0;
  NtdHooks hooks;
  hooks.on_episode = [&](int ep, double loss, const NeuralValueModel&) {
    if (ep < 200) early += loss;
    if (ep >= 1800) late += loss;
  };
  train_ntd(db, space, r, small_cfg(2000, 5), hooks);
  EXPECT_LT(late, early);
}

TEST(Persistence, LinearAndNeuralRoundTrip) {
  fixtures::TempDir tmp("model");
  LinearValueModel lin{Vector::LinSpaced(7, -1, 1)};
  write_model(store(lin, 42), tmp.path() / "lin.bin");
  const auto s = read_model(tmp.path() / "lin.bin");
  EXPECT_EQ(s.config_hash, 42u);
  EXPECT_EQ(restore_linear(s).theta, lin.theta);

  const auto net = make_neural_model(9, small_cfg(1, 1), 3);
  const auto bytes = serialize_model(store(net, 7));
  const auto back = restore_neural(parse_model(bytes));
  EXPECT_EQ(back.theta.params(), net.theta.params());
  EXPECT_EQ(back.theta.sizes(), net.theta.sizes());
  EXPECT_THROW(parse_model(bytes.substr(0, bytes.size() - 3)), Error);
  EXPECT_THROW(restore_linear(parse_model(bytes)), Error);
}
