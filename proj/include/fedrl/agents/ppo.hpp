#pragma once

#include <cmath>
#include <memory>
#include <numeric>

#include "fedrl/agents/a2c.hpp"

namespace fedrl::agents {

// Clipped-surrogate policy optimization: several full-batch epochs over each
// episode, with the behavior log-probabilities frozen at collection time.
class PPOAgent final : public ActorCriticBase {
 public:
  using ActorCriticBase::ActorCriticBase;

  AgentKind kind() const override { return AgentKind::kPPO; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<PPOAgent>(*this); }

  EpisodeResult train_episode(EpiEnv& env, std::uint64_t seed) override {
    const Rollout r = collect(env, seed, true);
    EpisodeResult res;
    res.reward = r.total_reward;
    res.steps = static_cast<int>(r.size());
    res.diag = update(r);
    return res;
  }

  Diagnostics update(const Rollout& r) {
    if (r.size() == 0) throw ContractError("ppo_update: empty rollout");
    if (r.log_probs.size() != r.size())
      throw ContractError("ppo_update: rollout lacks behavior log-probabilities");
    const auto returns = detail::discounted_returns(r.rewards, r.dones, cfg_.gamma);
    const auto values = values_of(r.states);
    std::vector<double> adv(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) adv[t] = returns[t] - values[t];
    adv = normalize_advantages(std::move(adv));
    const auto inputs = state_inputs(r.states);

    Diagnostics d;
    for (int epoch = 0; epoch < cfg_.ppo_epochs; ++epoch) {
      const LossGrad actor = ppo_actor_loss(actor_spec_, actor_, r.states, r.actions,
                                            r.log_probs, adv, cfg_.clip_eps, cfg_.entropy_coef);
      LossGrad critic = value_loss(critic_spec_, critic_, inputs, returns);
      for (double& g : critic.grad.values) g *= cfg_.value_coef;
      actor_opt_.step(actor_, actor.grad);
      critic_opt_.step(critic_, critic.grad);
      d.actor_loss = actor.loss;
      d.critic_loss = critic.loss;
      ++d.actor_updates;
      ++d.critic_updates;
    }
    return d;
  }
};

}  // namespace fedrl::agents
