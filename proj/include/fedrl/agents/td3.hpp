#pragma once

#include <algorithm>
#include <memory>

#include "fedrl/agents/ddpg.hpp"

namespace fedrl::agents {

// Twin critics with clipped double-Q targets, target-policy smoothing and a
// delayed actor/target schedule.
class TD3Agent final : public DeterministicAgentBase {
 public:
  TD3Agent(const AgentConfig& cfg, std::uint64_t seed) : DeterministicAgentBase(cfg, seed, 2) {}

  AgentKind kind() const override { return AgentKind::kTD3; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<TD3Agent>(*this); }

  long update_calls() const { return calls_; }

  // Adds clipped Gaussian noise to a target action, kept in [0,1].
  ActionIntensity smooth(ActionIntensity a, Rng& rng) const {
    for (double& v : a.a) {
      const double eps = std::clamp(cfg_.target_noise * rng.normal(), -cfg_.target_noise_clip,
                                    cfg_.target_noise_clip);
      v = std::clamp(v + eps, 0.0, 1.0);
    }
    return a;
  }

  ActionIntensity smoothed_target_action(const EpiState& next_state, Rng& rng) const {
    return smooth(run_actor(actor_target_, next_state), rng);
  }

  std::vector<double> targets(std::span<const Transition* const> batch, Rng& rng) const {
    const auto next = states_of(batch, true);
    auto next_a = run_actor_batch(actor_target_, next);
    for (auto& a : next_a) a = smooth(a, rng);
    const auto q1 = run_critic_batch(critic_targets_[0], next, next_a);
    const auto q2 = run_critic_batch(critic_targets_[1], next, next_a);
    std::vector<double> y(batch.size());
    for (std::size_t t = 0; t < batch.size(); ++t)
      y[t] = bellman_target(batch[t]->reward, batch[t]->done, std::min(q1[t], q2[t]), cfg_.gamma);
    return y;
  }

  Diagnostics update(std::span<const Transition* const> batch) override {
    check_batch(batch, "td3_update");
    ++calls_;
    Diagnostics d;
    const auto y = targets(batch, rng_);
    d.critic_loss = step_critic(0, batch, y);
    step_critic(1, batch, y);
    d.critic_updates = 1;
    if (calls_ % cfg_.policy_delay == 0) {
      d.actor_loss = step_actor(batch);
      soft_update_targets();
      d.actor_updates = 1;
    }
    return d;
  }

 private:
  long calls_ = 0;
};

}  // namespace fedrl::agents
