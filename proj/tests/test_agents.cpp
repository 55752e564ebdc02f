#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fedrl/agents/factory.hpp"
#include "fedrl/federation.hpp"
#include "grad_check.hpp"

using namespace fedrl;
using namespace fedrl::agents;
namespace gc = fedrl::gradcheck;

namespace {

AgentConfig tiny_config() {
  AgentConfig c;
  c.hidden = {8};
  c.batch_size = 4;
  c.replay_capacity = 64;
  return c;
}

std::vector<EpiState> random_states(Rng& rng, std::size_t n) {
  std::vector<EpiState> s(n);
  for (auto& x : s) x = gc::random_state(rng);
  return s;
}

// A frozen replay batch of `n` random transitions.
struct FrozenBatch {
  std::vector<Transition> storage;
  std::vector<const Transition*> ptrs;
};

FrozenBatch random_batch(Rng& rng, std::size_t n) {
  FrozenBatch b;
  for (std::size_t i = 0; i < n; ++i)
    b.storage.push_back({gc::random_state(rng), gc::random_intensity(rng), 2.0 * rng.uniform(),
                         gc::random_state(rng), rng.below(4) == 0});
  for (const auto& t : b.storage) b.ptrs.push_back(&t);
  return b;
}

std::vector<ActionLevels> random_levels(Rng& rng, std::size_t n) {
  std::vector<ActionLevels> a(n);
  for (auto& x : a) x = gc::random_levels(rng);
  return a;
}

std::vector<double> random_values(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

}  // namespace

// categorical head

TEST(Categorical, ProbabilitiesSumToOne) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto z = random_values(rng, kLogitCount, 30.0);
    for (const auto& row : softmax_levels(z)) {
      const double s = std::accumulate(row.begin(), row.end(), 0.0);
      ASSERT_NEAR(s, 1.0, 1e-12);
      for (double p : row) ASSERT_GE(p, 0.0);
    }
  }
}

TEST(Categorical, UniformLogitsGreedyPicksLevelZero) {
  const std::vector<double> z(kLogitCount, 0.37);
  const auto a = greedy_levels(z);
  for (auto l : a.level) EXPECT_EQ(l, 0);
}

TEST(Categorical, DominantLogitIsAlwaysSampled) {
  std::vector<double> z(kLogitCount, 0.0);
  for (std::size_t d = 0; d < kNumActions; ++d) z[d * kNumLevels + (d % kNumLevels)] = 800.0;
  const auto p = softmax_levels(z);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto a = sample_levels(p, rng);
    for (std::size_t d = 0; d < kNumActions; ++d) ASSERT_EQ(a.level[d], d % kNumLevels);
  }
  EXPECT_EQ(greedy_levels(z).level[5], 1);
}

TEST(Categorical, LogProbMatchesProbabilities) {
  Rng rng(3);
  const auto z = random_values(rng, kLogitCount, 3.0);
  const auto p = softmax_levels(z);
  const auto a = gc::random_levels(rng);
  double expected = 0;
  for (std::size_t d = 0; d < kNumActions; ++d) expected += std::log(p[d][a.level[d]]);
  EXPECT_NEAR(log_prob(z, a), expected, 1e-12);
  EXPECT_NEAR(entropy(softmax_levels(std::vector<double>(kLogitCount, 0.0))),
              kNumActions * std::log(4.0), 1e-12);
}

TEST(Categorical, SampledFrequenciesFollowProbabilities) {
  std::vector<double> z(kLogitCount, 0.0);
  z[1] = std::log(3.0);  // dimension 0: p = {1/6, 1/2, 1/6, 1/6}
  const auto p = softmax_levels(z);
  Rng rng(4);
  std::array<int, kNumLevels> counts{};
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[sample_levels(p, rng).level[0]];
  EXPECT_NEAR(counts[1] / double(n), 0.5, 0.01);
  EXPECT_NEAR(counts[0] / double(n), 1.0 / 6, 0.01);
}

// returns and surrogate

TEST(Returns, ZeroDiscountGivesImmediateRewards) {
  const std::vector<double> r{0.5, 1.25, 0.0, 2.0};
  EXPECT_EQ(agents::detail::discounted_returns(r, {false, false, false, true}, 0.0), r);
}

TEST(Returns, DiscountedSumWithTerminalCut) {
  const auto g = agents::detail::discounted_returns(std::vector<double>{1, 1, 1}, {false, true, false}, 0.5, 4.0);
  EXPECT_DOUBLE_EQ(g[2], 1 + 0.5 * 4);
  EXPECT_DOUBLE_EQ(g[1], 1);
  EXPECT_DOUBLE_EQ(g[0], 1.5);
}

TEST(Surrogate, ClippedBranchAtRatioOnePointFive) {
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, 1.0, 0.2), 1.2);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, -1.0, 0.2), -1.5);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -2.0, 0.2), -1.6);
}

TEST(Surrogate, UnitRatioGivesAdvantageMean) {
  Rng rng(5);
  const nn::MlpSpec spec{4, {5}, kLogitCount, nn::Head::kLogits};
  const auto params = nn::init_params(spec, rng);
  const auto states = random_states(rng, 6);
  const auto actions = random_levels(rng, 6);
  std::vector<double> old_lp;
  for (std::size_t t = 0; t < 6; ++t) {
    const auto x = to_input(states[t]);
    old_lp.push_back(log_prob(nn::forward(spec, params, x), actions[t]));
  }
  const auto adv = random_values(rng, 6);
  const auto lg = ppo_actor_loss(spec, params, states, actions, old_lp, adv, 0.2, 0.0);
  EXPECT_NEAR(-lg.loss, std::accumulate(adv.begin(), adv.end(), 0.0) / 6, 1e-12);
}

// loss gradients vs finite differences

TEST(LossGradients, A2CActorMatchesFiniteDifferences) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = gc::tiny_spec(rng, 4, kLogitCount, nn::Head::kLogits);
    const auto p = nn::init_params(spec, rng);
    const std::size_t n = 2 + rng.below(4);
    const auto s = random_states(rng, n);
    const auto a = random_levels(rng, n);
    const auto adv = random_values(rng, n);
    auto f = [&](const nn::ParamVector& q) { return a2c_actor_loss(spec, q, s, a, adv, 0.05).loss; };
    const auto lg = a2c_actor_loss(spec, p, s, a, adv, 0.05);
    ASSERT_LT(gc::relative_error(lg.grad.values, gc::numeric_grad(f, p)), 1e-4) << trial;
  }
}

TEST(LossGradients, A2CCombinedTwoStepRollout) {
  Rng rng(11);
  const auto actor_spec = gc::tiny_spec(rng, 4, kLogitCount, nn::Head::kLogits);
  const nn::MlpSpec critic_spec{4, {4}, 1, nn::Head::kLinear};
  const auto pa = nn::init_params(actor_spec, rng);
  const auto pc = nn::init_params(critic_spec, rng);
  const auto s = random_states(rng, 2);
  const auto a = random_levels(rng, 2);
  const auto returns = agents::detail::discounted_returns(std::vector<double>{1.3, 0.7}, {false, true}, 0.8);
  const auto inputs = state_inputs(s);
  std::vector<double> adv(2);
  for (std::size_t t = 0; t < 2; ++t) adv[t] = returns[t] - nn::forward(critic_spec, pc, to_input(s[t]))[0];
  // Joint parameter vector: actor then critic.
  auto split = [&](const nn::ParamVector& joint) {
    nn::ParamVector x(pa.layout), c(pc.layout);
    std::copy(joint.values.begin(), joint.values.begin() + x.size(), x.values.begin());
    std::copy(joint.values.begin() + x.size(), joint.values.end(), c.values.begin());
    return std::pair{x, c};
  };
  nn::Layout joint_layout{static_cast<std::uint32_t>(pa.size() + pc.size() - 1), 1};
  nn::ParamVector joint(joint_layout);
  std::copy(pa.values.begin(), pa.values.end(), joint.values.begin());
  std::copy(pc.values.begin(), pc.values.end(), joint.values.begin() + pa.size());
  auto f = [&](const nn::ParamVector& j) {
    auto [x, c] = split(j);
    return a2c_actor_loss(actor_spec, x, s, a, adv, 0.01).loss +
           0.5 * value_loss(critic_spec, c, inputs, returns).loss;
  };
  const auto ga = a2c_actor_loss(actor_spec, pa, s, a, adv, 0.01).grad;
  const auto gv = value_loss(critic_spec, pc, inputs, returns).grad;
  std::vector<double> analytic(ga.values);
  for (double g : gv.values) analytic.push_back(0.5 * g);
  EXPECT_LT(gc::relative_error(analytic, gc::numeric_grad(f, joint)), 1e-4);
}

TEST(LossGradients, ZeroAdvantageRemovesPolicyGradientTerm) {
  Rng rng(12);
  const nn::MlpSpec spec{4, {6}, kLogitCount, nn::Head::kLogits};
  const auto p = nn::init_params(spec, rng);
  const auto s = random_states(rng, 5);
  const auto a = random_levels(rng, 5);
  const std::vector<double> zero(5, 0.0);
  const auto lg = a2c_actor_loss(spec, p, s, a, zero, 0.0);
  for (double g : lg.grad.values) EXPECT_EQ(g, 0.0);
  // With the entropy bonus on, only the entropy part remains.
  const auto with_h = a2c_actor_loss(spec, p, s, a, zero, 0.1);
  const auto other_actions = random_levels(rng, 5);
  EXPECT_EQ(with_h.grad, a2c_actor_loss(spec, p, s, other_actions, zero, 0.1).grad);
}

TEST(LossGradients, ValueLossMatchesFiniteDifferences) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = gc::tiny_spec(rng, 4, 1, nn::Head::kLinear);
    const auto p = nn::init_params(spec, rng);
    const std::size_t n = 1 + rng.below(6);
    const auto x = state_inputs(random_states(rng, n));
    const auto y = random_values(rng, n, 3.0);
    auto f = [&](const nn::ParamVector& q) { return value_loss(spec, q, x, y).loss; };
    ASSERT_LT(gc::relative_error(value_loss(spec, p, x, y).grad.values, gc::numeric_grad(f, p)), 1e-4);
  }
}

TEST(LossGradients, PPOActorMatchesFiniteDifferences) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = gc::tiny_spec(rng, 4, kLogitCount, nn::Head::kLogits);
    const auto p = nn::init_params(spec, rng);
    const std::size_t n = 2 + rng.below(5);
    const auto s = random_states(rng, n);
    const auto a = random_levels(rng, n);
    std::vector<double> old_lp;
    // Ratios spread across both sides of the clip window.
    for (std::size_t t = 0; t < n; ++t)
      old_lp.push_back(log_prob(nn::forward(spec, p, to_input(s[t])), a[t]) + rng.uniform(-0.5, 0.5));
    const auto adv = random_values(rng, n);
    auto f = [&](const nn::ParamVector& q) {
      return ppo_actor_loss(spec, q, s, a, old_lp, adv, 0.2, 0.02).loss;
    };
    const auto lg = ppo_actor_loss(spec, p, s, a, old_lp, adv, 0.2, 0.02);
    ASSERT_LT(gc::relative_error(lg.grad.values, gc::numeric_grad(f, p)), 1e-4) << trial;
  }
}

TEST(LossGradients, DeterministicPolicyMatchesFiniteDifferences) {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto actor_spec = gc::tiny_spec(rng, 4, kNumActions, nn::Head::kBounded);
    const auto critic_spec = gc::tiny_spec(rng, kObsDim + kNumActions, 1, nn::Head::kLinear);
    const auto pa = nn::init_params(actor_spec, rng);
    const auto pc = nn::init_params(critic_spec, rng);
    const auto s = random_states(rng, 1 + rng.below(5));
    auto f = [&](const nn::ParamVector& q) { return dpg_actor_loss(actor_spec, q, critic_spec, pc, s).loss; };
    const auto lg = dpg_actor_loss(actor_spec, pa, critic_spec, pc, s);
    ASSERT_LT(gc::relative_error(lg.grad.values, gc::numeric_grad(f, pa)), 1e-4) << trial;
  }
}

TEST(LossGradients, EmptyBatchesRejected) {
  const nn::MlpSpec spec{4, {3}, kLogitCount, nn::Head::kLogits};
  const nn::ParamVector p(spec.layout());
  EXPECT_THROW(a2c_actor_loss(spec, p, {}, {}, {}, 0.0), ContractError);
  A2CAgent a2c(tiny_config(), 1);
  EXPECT_THROW(a2c.update(Rollout{}), ContractError);
  PPOAgent ppo(tiny_config(), 1);
  EXPECT_THROW(ppo.update(Rollout{}), ContractError);
}

// PPO

TEST(PPO, ZeroAdvantageAndZeroEntropyLeavePolicyUnchanged) {
  AgentConfig cfg = tiny_config();
  cfg.entropy_coef = 0.0;
  cfg.gamma = 0.0;
  PPOAgent agent(cfg, 7);
  EnvConfig env_cfg;
  env_cfg.horizon = 30;
  EpiEnv env(env_cfg);
  Rollout r = agent.collect(env, 3, true);
  // Returns sit a constant above the critic, so advantages normalize to 0.
  for (std::size_t t = 0; t < r.size(); ++t) r.rewards[t] = agent.value(r.states[t]) + 0.5;
  const auto before = agent.params();
  agent.update(r);
  EXPECT_EQ(agent.params()[0], before[0]);
}

TEST(PPO, RunsConfiguredNumberOfEpochs) {
  AgentConfig cfg = tiny_config();
  cfg.ppo_epochs = 3;
  PPOAgent agent(cfg, 7);
  EnvConfig env_cfg;
  env_cfg.horizon = 10;
  EpiEnv env(env_cfg);
  const auto res = agent.train_episode(env, 1);
  EXPECT_EQ(res.diag.actor_updates, 3);
  EXPECT_EQ(res.steps, 10);
}

TEST(PPO, RejectsRolloutWithoutLogProbs) {
  PPOAgent agent(tiny_config(), 7);
  EnvConfig env_cfg;
  env_cfg.horizon = 5;
  EpiEnv env(env_cfg);
  EXPECT_THROW(agent.update(agent.collect(env, 1, false)), ContractError);
}

// A2C

TEST(A2C, NormalizedAdvantagesHaveZeroMeanUnitVariance) {
  const auto a = normalize_advantages({1.0, 2.0, 3.0, 6.0});
  EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), 0.0, 1e-12);
  double v = 0;
  for (double x : a) v += x * x;
  EXPECT_NEAR(v / 4, 1.0, 1e-12);
  for (double x : normalize_advantages({0.5, 0.5, 0.5})) EXPECT_EQ(x, 0.0);
}

TEST(A2C, OneUpdatePerEpisode) {
  A2CAgent agent(tiny_config(), 2);
  EnvConfig env_cfg;
  env_cfg.horizon = 12;
  EpiEnv env(env_cfg);
  const auto before = agent.params();
  const auto res = agent.train_episode(env, 9);
  EXPECT_EQ(res.diag.actor_updates, 1);
  EXPECT_EQ(res.diag.critic_updates, 1);
  EXPECT_NE(agent.params()[0], before[0]);
  EXPECT_NE(agent.params()[1], before[1]);
}

// DDPG

TEST(DDPG, TauOneCopiesOnlineIntoTargets) {
  AgentConfig cfg = tiny_config();
  cfg.tau = 1.0;
  DDPGAgent agent(cfg, 3);
  Rng rng(3);
  auto batch = random_batch(rng, 8);
  agent.update(batch.ptrs);
  const auto p = agent.params();  // actor, critic, actor_target, critic_target
  EXPECT_EQ(p[2], p[0]);
  EXPECT_EQ(p[3], p[1]);
}

TEST(DDPG, ZeroDiscountTargetIsReward) {
  AgentConfig cfg = tiny_config();
  cfg.gamma = 0.0;
  DDPGAgent agent(cfg, 3);
  Rng rng(4);
  auto batch = random_batch(rng, 16);
  const auto y = agent.targets(batch.ptrs);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], batch.storage[i].reward);
}

TEST(DDPG, TargetFollowsBellmanEquation) {
  DDPGAgent agent(tiny_config(), 3);
  Rng rng(5);
  auto batch = random_batch(rng, 8);
  const auto y = agent.targets(batch.ptrs);
  const auto p = agent.params();
  const auto& spec = agent.actor_spec();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto& t = batch.storage[i];
    const auto mu = nn::forward(spec, p[2], to_input(t.next_state));
    ActionIntensity a;
    std::copy(mu.begin(), mu.end(), a.a.begin());
    const double q = nn::forward(agent.critic_spec(), p[3], critic_input(t.next_state, a))[0];
    EXPECT_NEAR(y[i], t.reward + (t.done ? 0.0 : 0.8 * q), 1e-12);
  }
}

TEST(DDPG, CriticLossFallsOnFrozenBatch) {
  AgentConfig cfg;
  cfg.batch_size = 32;
  cfg.actor_lr = 1e-4;
  cfg.critic_lr = 1e-3;
  DDPGAgent agent(cfg, 11);
  Rng rng(11);
  auto batch = random_batch(rng, 32);
  double prev = agent.update(batch.ptrs).critic_loss;
  for (int i = 1; i < 10; ++i) {
    const double loss = agent.update(batch.ptrs).critic_loss;
    EXPECT_LT(loss, prev) << "iteration " << i;
    prev = loss;
  }
}

TEST(DDPG, RejectsSmallBatch) {
  DDPGAgent agent(tiny_config(), 1);
  Rng rng(1);
  auto batch = random_batch(rng, 3);
  EXPECT_THROW(agent.update(batch.ptrs), ContractError);
  TD3Agent td3(tiny_config(), 1);
  EXPECT_THROW(td3.update(batch.ptrs), ContractError);
}

// TD3

TEST(TD3, EqualTwinTargetsMatchDDPG) {
  AgentConfig cfg = tiny_config();
  cfg.target_noise = 0.0;
  TD3Agent td3(cfg, 5);
  DDPGAgent ddpg(cfg, 5);
  auto p = td3.params();  // actor, c1, c2, actor_t, c1_t, c2_t
  p[5] = p[4];
  td3.load(p);
  ddpg.load({p[0], p[1], p[3], p[4]});
  Rng rng(6), noise(0);
  auto batch = random_batch(rng, 10);
  const auto a = td3.targets(batch.ptrs, noise);
  const auto b = ddpg.targets(batch.ptrs);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(TD3, ActorUpdatesEveryOtherCall) {
  TD3Agent agent(tiny_config(), 5);
  Rng rng(7);
  auto batch = random_batch(rng, 8);
  int actor = 0, critic = 0;
  for (int i = 0; i < 10; ++i) {
    const auto d = agent.update(batch.ptrs);
    actor += d.actor_updates;
    critic += d.critic_updates;
  }
  EXPECT_EQ(actor, 5);
  EXPECT_EQ(critic, 10);
  EXPECT_EQ(agent.update_calls(), 10);
}

TEST(TD3, TargetsOnlyMoveOnActorSteps) {
  TD3Agent agent(tiny_config(), 5);
  Rng rng(8);
  auto batch = random_batch(rng, 8);
  const auto p0 = agent.params();
  agent.update(batch.ptrs);
  const auto p1 = agent.params();
  EXPECT_EQ(p1[0], p0[0]);
  EXPECT_EQ(p1[3], p0[3]);
  EXPECT_NE(p1[1], p0[1]);
  agent.update(batch.ptrs);
  const auto p2 = agent.params();
  EXPECT_NE(p2[0], p1[0]);
  EXPECT_NE(p2[3], p1[3]);
}

TEST(TD3, IdenticalTwinsWithoutNoiseHaveEqualLosses) {
  AgentConfig cfg = tiny_config();
  cfg.target_noise = 0.0;
  TD3Agent agent(cfg, 9);
  auto p = agent.params();
  p[2] = p[1];
  p[5] = p[4];
  agent.load(p);
  Rng rng(9);
  auto batch = random_batch(rng, 12);
  for (int i = 0; i < 4; ++i) {
    agent.update(batch.ptrs);
    const auto q = agent.params();
    ASSERT_EQ(q[1], q[2]);
    ASSERT_EQ(q[4], q[5]);
  }
}

TEST(TD3, SmoothingNoiseIsClippedAndBounded) {
  AgentConfig cfg = tiny_config();
  cfg.target_noise = 5.0;
  cfg.target_noise_clip = 0.25;
  TD3Agent agent(cfg, 1);
  Rng rng(10);
  for (int i = 0; i < 200; ++i) {
    const auto base = gc::random_intensity(rng);
    const auto s = agent.smooth(base, rng);
    for (std::size_t d = 0; d < kNumActions; ++d) {
      ASSERT_LE(std::abs(s.a[d] - base.a[d]), 0.25 + 1e-15);
      ASSERT_GE(s.a[d], 0.0);
      ASSERT_LE(s.a[d], 1.0);
    }
  }
}

// replay buffer

TEST(Replay, EvictsOldestFirst) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push({EpiState{}, ActionLevels{}, double(i), EpiState{}, false});
  ASSERT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf[0].reward, 2);
  EXPECT_EQ(buf[2].reward, 4);
}

TEST(Replay, SampleBoundedByLength) {
  ReplayBuffer buf(10);
  Rng rng(1);
  buf.push({});
  buf.push({});
  EXPECT_EQ(buf.sample(2, rng).size(), 2u);
  EXPECT_THROW(buf.sample(3, rng), ContractError);
  EXPECT_THROW(ReplayBuffer(0), ContractError);
}

// shared invariants

class EveryAgent : public ::testing::TestWithParam<AgentKind> {};

TEST_P(EveryAgent, LoadOfParamsPreservesBehavior) {
  auto a = make_agent(GetParam(), tiny_config(), 21);
  auto b = make_agent(GetParam(), tiny_config(), 99);
  b->load(a->params());
  Rng rng(0);
  for (int i = 0; i < 20; ++i) {
    const auto s = gc::random_state(rng);
    for (auto mode : {ActMode::kGreedy, ActMode::kStochastic}) {
      Rng ra(i), rb(i);
      ASSERT_EQ(a->act(s, mode, ra), b->act(s, mode, rb));
    }
  }
}

TEST_P(EveryAgent, LayoutsStableAcrossTraining) {
  auto a = make_agent(GetParam(), tiny_config(), 4);
  const auto before = a->params();
  EnvConfig env_cfg;
  env_cfg.horizon = 12;
  EpiEnv env(env_cfg);
  a->train_episode(env, 1);
  a->train_episode(env, 2);
  const auto after = a->params();
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i].layout, after[i].layout);
  EXPECT_EQ(a->network_names().size(), before.size());
  EXPECT_EQ(a->network_specs().size(), before.size());
  EXPECT_THROW(a->load({}), ContractError);
}

TEST_P(EveryAgent, SeededActingIsDeterministic) {
  auto a = make_agent(GetParam(), tiny_config(), 8);
  const EpiState s{0.99, 0.01, 0.0, 0.001};
  Rng r1(77), r2(77);
  EXPECT_EQ(a->act(s, ActMode::kStochastic, r1), a->act(s, ActMode::kStochastic, r2));
}

TEST_P(EveryAgent, TrainingIsReproducible) {
  EnvConfig env_cfg;
  env_cfg.horizon = 15;
  auto run = [&] {
    auto a = make_agent(GetParam(), tiny_config(), 12);
    EpiEnv env(env_cfg);
    double total = 0;
    for (int e = 0; e < 3; ++e) total += a->train_episode(env, static_cast<std::uint64_t>(e)).reward;
    return std::pair{total, a->params()};
  };
  EXPECT_EQ(run(), run());
}

INSTANTIATE_TEST_SUITE_P(All, EveryAgent,
                         ::testing::Values(AgentKind::kA2C, AgentKind::kPPO, AgentKind::kDDPG,
                                           AgentKind::kTD3),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(ContinuousActions, StayInUnitCubeWithNoise) {
  AgentConfig cfg = tiny_config();
  cfg.explore_noise = 3.0;
  for (auto kind : {AgentKind::kDDPG, AgentKind::kTD3}) {
    auto a = make_agent(kind, cfg, 1);
    Rng rng(2);
    for (int i = 0; i < 300; ++i) {
      const auto act = std::get<ActionIntensity>(a->act(gc::random_state(rng), ActMode::kStochastic, rng));
      for (double v : act.a) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
    }
  }
}

TEST(Factory, NamesRoundTrip) {
  for (auto k : {AgentKind::kA2C, AgentKind::kPPO, AgentKind::kDDPG, AgentKind::kTD3, AgentKind::kRandom})
    EXPECT_EQ(parse_agent_kind(to_string(k)), k);
  EXPECT_FALSE(parse_agent_kind("sac").has_value());
}

TEST(Config, ValidationNamesKey) {
  AgentConfig c;
  c.gamma = 1.5;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("agent.gamma"), std::string::npos);
  }
  c = AgentConfig{};
  c.replay_capacity = 10;
  EXPECT_THROW(c.validate(), ConfigError);
}

// learning signal: 50 training episodes beat the uniform-random policy

class LearnsOverRandom : public ::testing::TestWithParam<AgentKind> {};

TEST_P(LearnsOverRandom, FiftyEpisodesOnFiveSeeds) {
  const EnvConfig env_cfg;
  const federation::EvalConfig eval{10};
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto agent = make_agent(GetParam(), AgentConfig{}, derive_seed(seed, streams::kAgent));
    EpiEnv env(env_cfg);
    Rng episodes(derive_seed(seed, streams::kEnv));
    for (int e = 0; e < 50; ++e) agent->train_episode(env, episodes.next_u64());
    const double learned = federation::evaluate_agent(*agent, env_cfg, eval, seed);
    const double random = federation::evaluate_agent(RandomAgent{}, env_cfg, eval, seed);
    std::printf("  %s seed %llu: learned %.2f random %.2f\n", std::string(to_string(GetParam())).c_str(),
                static_cast<unsigned long long>(seed), learned, random);
    wins += learned > random;
  }
  EXPECT_GE(wins, 4);
}

INSTANTIATE_TEST_SUITE_P(All, LearnsOverRandom,
                         ::testing::Values(AgentKind::kA2C, AgentKind::kPPO, AgentKind::kDDPG,
                                           AgentKind::kTD3),
                         [](const auto& info) { return std::string(to_string(info.param)); });
