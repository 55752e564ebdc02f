#pragma once

#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "fedrl/agents/agent.hpp"
#include "fedrl/agents/categorical.hpp"
#include "fedrl/agents/losses.hpp"

namespace fedrl::agents {

// Rescales to zero mean and unit variance; leaves a constant batch at zero.
inline std::vector<double> normalize_advantages(std::vector<double> adv) {
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : adv) a = sd > 1e-12 ? (a - mean) / sd : 0.0;
  return adv;
}

// Everything an on-policy update needs from one episode.
struct Rollout {
  std::vector<EpiState> states;
  std::vector<ActionLevels> actions;
  std::vector<double> rewards;
  std::vector<bool> dones;
  std::vector<double> log_probs;  // behavior policy, filled by PPO
  double total_reward = 0.0;

  std::size_t size() const { return states.size(); }
};

// Actor-critic base for the two discrete-level learners: a 28-logit policy
// network and a scalar value network with separate optimizers.
class ActorCriticBase : public Agent {
 public:
  ActorCriticBase(const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), rng_(seed) {
    cfg_.validate();
    actor_spec_ = {static_cast<std::uint32_t>(kObsDim), cfg_.hidden,
                   static_cast<std::uint32_t>(kLogitCount), nn::Head::kLogits};
    critic_spec_ = {static_cast<std::uint32_t>(kObsDim), cfg_.hidden, 1, nn::Head::kLinear};
    actor_ = nn::init_params(actor_spec_, rng_, 0.01);
    critic_ = nn::init_params(critic_spec_, rng_, 1.0);
    actor_opt_ = nn::Adam({cfg_.actor_lr});
    critic_opt_ = nn::Adam({cfg_.critic_lr});
  }

  Action act(const EpiState& state, ActMode mode, Rng& rng) const override {
    const auto x = to_input(state);
    const auto z = nn::forward(actor_spec_, actor_, x);
    if (mode == ActMode::kGreedy) return greedy_levels(z);
    return sample_levels(softmax_levels(z), rng);
  }

  LevelProbs probabilities(const EpiState& state) const {
    const auto x = to_input(state);
    return softmax_levels(nn::forward(actor_spec_, actor_, x));
  }

  double value(const EpiState& state) const {
    const auto x = to_input(state);
    return nn::forward(critic_spec_, critic_, x)[0];
  }

  std::vector<nn::ParamVector> params() const override { return {actor_, critic_}; }

  void load(const std::vector<nn::ParamVector>& p) override {
    detail::check_load(p, params(), "ActorCritic");
    actor_ = p[0];
    critic_ = p[1];
  }

  std::vector<std::string> network_names() const override { return {"actor", "critic"}; }
  std::vector<nn::MlpSpec> network_specs() const override { return {actor_spec_, critic_spec_}; }

  const AgentConfig& config() const { return cfg_; }
  const nn::MlpSpec& actor_spec() const { return actor_spec_; }
  const nn::MlpSpec& critic_spec() const { return critic_spec_; }

  // Samples a full episode with the current stochastic policy.
  Rollout collect(EpiEnv& env, std::uint64_t seed, bool record_log_probs) {
    Rollout r;
    EpiState s = env.reset(seed);
    const std::size_t h = static_cast<std::size_t>(env.config().horizon);
    r.states.reserve(h);
    r.actions.reserve(h);
    r.rewards.reserve(h);
    while (!env.done()) {
      const auto x = to_input(s);
      const auto z = nn::forward(actor_spec_, actor_, x);
      const auto p = softmax_levels(z);
      const ActionLevels a = sample_levels(p, rng_);
      if (record_log_probs) r.log_probs.push_back(log_prob(z, a));
      const StepOutcome out = env.step(a);
      r.states.push_back(s);
      r.actions.push_back(a);
      r.rewards.push_back(out.reward);
      r.dones.push_back(out.done);
      r.total_reward += out.reward;
      s = out.observation;
    }
    return r;
  }

  std::vector<double> values_of(const std::vector<EpiState>& states) const {
    std::vector<double> v;
    v.reserve(states.size());
    for (const auto& s : states) v.push_back(value(s));
    return v;
  }

 protected:
  AgentConfig cfg_;
  Rng rng_;
  nn::MlpSpec actor_spec_;
  nn::MlpSpec critic_spec_;
  nn::ParamVector actor_;
  nn::ParamVector critic_;
  nn::Adam actor_opt_;
  nn::Adam critic_opt_;
};

// Synchronous advantage actor-critic: one gradient step for the policy and
// one for the value function per collected episode.
class A2CAgent final : public ActorCriticBase {
 public:
  using ActorCriticBase::ActorCriticBase;

  AgentKind kind() const override { return AgentKind::kA2C; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<A2CAgent>(*this); }

  EpisodeResult train_episode(EpiEnv& env, std::uint64_t seed) override {
    const Rollout r = collect(env, seed, false);
    EpisodeResult res;
    res.reward = r.total_reward;
    res.steps = static_cast<int>(r.size());
    res.diag = update(r);
    return res;
  }

  Diagnostics update(const Rollout& r) {
    if (r.size() == 0) throw ContractError("a2c_update: empty rollout");
    const auto returns = detail::discounted_returns(r.rewards, r.dones, cfg_.gamma);
    const auto values = values_of(r.states);
    std::vector<double> adv(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) adv[t] = returns[t] - values[t];
    if (cfg_.normalize_advantage) adv = normalize_advantages(std::move(adv));

    const LossGrad actor = a2c_actor_loss(actor_spec_, actor_, r.states, r.actions, adv,
                                          cfg_.entropy_coef);
    const auto inputs = state_inputs(r.states);
    LossGrad critic = value_loss(critic_spec_, critic_, inputs, returns);
    for (double& g : critic.grad.values) g *= cfg_.value_coef;
    actor_opt_.step(actor_, actor.grad);
    critic_opt_.step(critic_, critic.grad);

    Diagnostics d;
    d.actor_loss = actor.loss;
    d.critic_loss = critic.loss;
    d.actor_updates = d.critic_updates = 1;
    return d;
  }
};

}  // namespace fedrl::agents
