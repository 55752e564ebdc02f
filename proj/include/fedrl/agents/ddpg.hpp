#pragma once

#include <algorithm>
#include <memory>
#include <span>

#include "fedrl/agents/agent.hpp"
#include "fedrl/agents/losses.hpp"

namespace fedrl::agents {

// r + gamma * (1 - done) * q_next
inline double bellman_target(double reward, bool done, double q_next, double gamma) {
  return reward + gamma * (done ? 0.0 : 1.0) * q_next;
}

// Shared machinery of the deterministic-policy learners: a bounded actor
// emitting intensities in [0,1]^7, one or two critics over
// (state, intensity), target copies of everything, and a replay buffer.
// Updates run once per environment step after the buffer holds a batch.
class DeterministicAgentBase : public Agent {
 public:
  DeterministicAgentBase(const AgentConfig& cfg, std::uint64_t seed, std::size_t n_critics)
      : cfg_(cfg), rng_(seed), buffer_(std::max<std::size_t>(cfg.replay_capacity, 1)) {
    cfg_.validate();
    actor_spec_ = {static_cast<std::uint32_t>(kObsDim), cfg_.hidden,
                   static_cast<std::uint32_t>(kNumActions), nn::Head::kBounded};
    critic_spec_ = {static_cast<std::uint32_t>(kObsDim + kNumActions), cfg_.hidden, 1,
                    nn::Head::kLinear};
    actor_ = nn::init_params(actor_spec_, rng_, 1.0);
    for (std::size_t i = 0; i < n_critics; ++i) critics_.push_back(nn::init_params(critic_spec_, rng_, 1.0));
    actor_target_ = actor_;
    critic_targets_ = critics_;
    actor_opt_ = nn::Adam({cfg_.actor_lr});
    critic_opts_.assign(n_critics, nn::Adam({cfg_.critic_lr}));
  }

  ActionIntensity policy(const EpiState& s) const { return run_actor(actor_, s); }

  Action act(const EpiState& state, ActMode mode, Rng& rng) const override {
    ActionIntensity a = policy(state);
    if (mode == ActMode::kStochastic)
      for (double& v : a.a) v = std::clamp(v + cfg_.explore_noise * rng.normal(), 0.0, 1.0);
    return a;
  }

  EpisodeResult train_episode(EpiEnv& env, std::uint64_t seed) override {
    EpisodeResult res;
    EpiState s = env.reset(seed);
    while (!env.done()) {
      const auto a = std::get<ActionIntensity>(act(s, ActMode::kStochastic, rng_));
      const StepOutcome out = env.step(a);
      buffer_.push({s, a, out.reward, out.observation, out.done});
      res.reward += out.reward;
      ++res.steps;
      s = out.observation;
      if (buffer_.size() >= cfg_.batch_size) {
        const auto batch = buffer_.sample(cfg_.batch_size, rng_);
        const Diagnostics d = update(batch);
        res.diag.actor_loss = d.actor_loss;
        res.diag.critic_loss = d.critic_loss;
        res.diag.actor_updates += d.actor_updates;
        res.diag.critic_updates += d.critic_updates;
      }
    }
    return res;
  }

  virtual Diagnostics update(std::span<const Transition* const> batch) = 0;

  std::vector<nn::ParamVector> params() const override {
    std::vector<nn::ParamVector> out{actor_};
    out.insert(out.end(), critics_.begin(), critics_.end());
    out.push_back(actor_target_);
    out.insert(out.end(), critic_targets_.begin(), critic_targets_.end());
    return out;
  }

  void load(const std::vector<nn::ParamVector>& p) override {
    detail::check_load(p, params(), "DeterministicAgent");
    const std::size_t n = critics_.size();
    actor_ = p[0];
    for (std::size_t i = 0; i < n; ++i) critics_[i] = p[1 + i];
    actor_target_ = p[1 + n];
    for (std::size_t i = 0; i < n; ++i) critic_targets_[i] = p[2 + n + i];
  }

  std::vector<std::string> network_names() const override {
    std::vector<std::string> names{"actor"};
    const bool twin = critics_.size() > 1;
    for (std::size_t i = 0; i < critics_.size(); ++i)
      names.push_back(twin ? "critic" + std::to_string(i + 1) : "critic");
    names.push_back("actor_target");
    for (std::size_t i = 0; i < critics_.size(); ++i)
      names.push_back(twin ? "critic" + std::to_string(i + 1) + "_target" : "critic_target");
    return names;
  }

  std::vector<nn::MlpSpec> network_specs() const override {
    std::vector<nn::MlpSpec> specs{actor_spec_};
    for (std::size_t i = 0; i < critics_.size(); ++i) specs.push_back(critic_spec_);
    specs.push_back(actor_spec_);
    for (std::size_t i = 0; i < critics_.size(); ++i) specs.push_back(critic_spec_);
    return specs;
  }

  double q_value(std::size_t critic, const EpiState& s, const ActionIntensity& a) const {
    return nn::forward(critic_spec_, critics_.at(critic), critic_input(s, a))[0];
  }

  const AgentConfig& config() const { return cfg_; }
  const nn::MlpSpec& actor_spec() const { return actor_spec_; }
  const nn::MlpSpec& critic_spec() const { return critic_spec_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  ReplayBuffer& buffer() { return buffer_; }

 protected:
  ActionIntensity run_actor(const nn::ParamVector& params, const EpiState& s) const {
    const auto x = to_input(s);
    const auto y = nn::forward(actor_spec_, params, x);
    ActionIntensity a;
    std::copy(y.begin(), y.end(), a.a.begin());
    return a;
  }

  double run_critic(const nn::ParamVector& params, const EpiState& s,
                    const ActionIntensity& a) const {
    return nn::forward(critic_spec_, params, critic_input(s, a))[0];
  }

  std::vector<ActionIntensity> run_actor_batch(const nn::ParamVector& params,
                                               std::span<const EpiState> states) const {
    const nn::Matrix y = nn::forward_batch(actor_spec_, params, state_inputs(states));
    std::vector<ActionIntensity> out(states.size());
    for (std::size_t t = 0; t < states.size(); ++t)
      std::copy(y.row(t), y.row(t) + kNumActions, out[t].a.begin());
    return out;
  }

  std::vector<double> run_critic_batch(const nn::ParamVector& params,
                                       std::span<const EpiState> states,
                                       std::span<const ActionIntensity> actions) const {
    return nn::forward_batch(critic_spec_, params, critic_inputs(states, actions)).data;
  }

  static std::vector<EpiState> states_of(std::span<const Transition* const> batch, bool next) {
    std::vector<EpiState> out;
    out.reserve(batch.size());
    for (const Transition* t : batch) out.push_back(next ? t->next_state : t->state);
    return out;
  }

  static std::vector<ActionIntensity> actions_of(std::span<const Transition* const> batch) {
    std::vector<ActionIntensity> out;
    out.reserve(batch.size());
    for (const Transition* t : batch) out.push_back(std::get<ActionIntensity>(t->action));
    return out;
  }

  void check_batch(std::span<const Transition* const> batch, const char* who) const {
    if (batch.size() < cfg_.batch_size || batch.empty())
      throw ContractError(std::string(who) + ": batch smaller than configured minimum");
  }

  // One descent step of critic `i` on the squared Bellman error.
  double step_critic(std::size_t i, std::span<const Transition* const> batch,
                     std::span<const double> targets) {
    const auto states = states_of(batch, false);
    const auto actions = actions_of(batch);
    const LossGrad lg =
        value_loss(critic_spec_, critics_[i], critic_inputs(states, actions), targets);
    critic_opts_[i].step(critics_[i], lg.grad);
    return lg.loss;
  }

  // One ascent step of the actor on Q_0(s, mu(s)).
  double step_actor(std::span<const Transition* const> batch) {
    const auto states = states_of(batch, false);
    const LossGrad lg = dpg_actor_loss(actor_spec_, actor_, critic_spec_, critics_[0], states);
    actor_opt_.step(actor_, lg.grad);
    return lg.loss;
  }

  void soft_update_targets() {
    detail::soft_update(actor_target_, actor_, cfg_.tau);
    for (std::size_t i = 0; i < critics_.size(); ++i)
      detail::soft_update(critic_targets_[i], critics_[i], cfg_.tau);
  }

  AgentConfig cfg_;
  Rng rng_;
  ReplayBuffer buffer_;
  nn::MlpSpec actor_spec_;
  nn::MlpSpec critic_spec_;
  nn::ParamVector actor_;
  std::vector<nn::ParamVector> critics_;
  nn::ParamVector actor_target_;
  std::vector<nn::ParamVector> critic_targets_;
  nn::Adam actor_opt_;
  std::vector<nn::Adam> critic_opts_;
};

class DDPGAgent final : public DeterministicAgentBase {
 public:
  DDPGAgent(const AgentConfig& cfg, std::uint64_t seed) : DeterministicAgentBase(cfg, seed, 1) {}

  AgentKind kind() const override { return AgentKind::kDDPG; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<DDPGAgent>(*this); }

  std::vector<double> targets(std::span<const Transition* const> batch) const {
    const auto next = states_of(batch, true);
    const auto next_a = run_actor_batch(actor_target_, next);
    const auto q_next = run_critic_batch(critic_targets_[0], next, next_a);
    std::vector<double> y(batch.size());
    for (std::size_t t = 0; t < batch.size(); ++t)
      y[t] = bellman_target(batch[t]->reward, batch[t]->done, q_next[t], cfg_.gamma);
    return y;
  }

  Diagnostics update(std::span<const Transition* const> batch) override {
    check_batch(batch, "ddpg_update");
    Diagnostics d;
    const auto y = targets(batch);
    d.critic_loss = step_critic(0, batch, y);
    d.actor_loss = step_actor(batch);
    soft_update_targets();
    d.critic_updates = d.actor_updates = 1;
    return d;
  }
};

}  // namespace fedrl::agents
