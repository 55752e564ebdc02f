#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fedrl/epi_env.hpp"
#include "fedrl/errors.hpp"
#include "fedrl/nn/adam.hpp"
#include "fedrl/nn/mlp.hpp"
#include "fedrl/rng.hpp"

namespace fedrl::agents {

enum class AgentKind { kA2C, kPPO, kDDPG, kTD3, kRandom };

inline std::string_view to_string(AgentKind k) {
  switch (k) {
    case AgentKind::kA2C: return "a2c";
    case AgentKind::kPPO: return "ppo";
    case AgentKind::kDDPG: return "ddpg";
    case AgentKind::kTD3: return "td3";
    case AgentKind::kRandom: return "random";
  }
  return "?";
}

inline std::optional<AgentKind> parse_agent_kind(std::string_view s) {
  for (auto k : {AgentKind::kA2C, AgentKind::kPPO, AgentKind::kDDPG, AgentKind::kTD3,
                 AgentKind::kRandom})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// Hyperparameters for every algorithm; each agent reads the fields it uses.
struct AgentConfig {
  std::vector<std::uint32_t> hidden{64, 64};
  double gamma = 0.8;
  double actor_lr = 3e-3;
  double critic_lr = 3e-3;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  // A2C: rescale each episode's advantages to zero mean, unit variance.
  bool normalize_advantage = true;
  // PPO
  int ppo_epochs = 4;
  double clip_eps = 0.2;
  // DDPG / TD3
  double tau = 0.005;
  double explore_noise = 0.1;
  double target_noise = 0.1;
  double target_noise_clip = 0.25;
  int policy_delay = 2;
  std::size_t replay_capacity = 100000;
  std::size_t batch_size = 64;

  void validate() const {
    if (hidden.empty()) throw ConfigError("agent.hidden", "needs at least one layer");
    for (auto h : hidden)
      if (h == 0) throw ConfigError("agent.hidden", "widths must be >= 1");
    auto unit = [](const char* key, double v) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must be in [0,1]");
    };
    auto nonneg = [](const char* key, double v) {
      if (!(v >= 0.0)) throw ConfigError(key, "must be non-negative");
    };
    unit("agent.gamma", gamma);
    if (!(actor_lr > 0.0)) throw ConfigError("agent.actor_lr", "must be positive");
    if (!(critic_lr > 0.0)) throw ConfigError("agent.critic_lr", "must be positive");
    nonneg("agent.entropy_coef", entropy_coef);
    nonneg("agent.value_coef", value_coef);
    if (ppo_epochs < 1) throw ConfigError("agent.ppo_epochs", "must be >= 1");
    unit("agent.clip_eps", clip_eps);
    unit("agent.tau", tau);
    nonneg("agent.explore_noise", explore_noise);
    nonneg("agent.target_noise", target_noise);
    nonneg("agent.target_noise_clip", target_noise_clip);
    if (policy_delay < 1) throw ConfigError("agent.policy_delay", "must be >= 1");
    if (batch_size < 1) throw ConfigError("agent.batch_size", "must be >= 1");
    if (replay_capacity < batch_size)
      throw ConfigError("agent.replay_capacity", "must be >= batch_size");
  }

  bool operator==(const AgentConfig&) const = default;
};

using Action = std::variant<ActionLevels, ActionIntensity>;

enum class ActMode { kStochastic, kGreedy };

struct Transition {
  EpiState state;
  Action action;
  double reward = 0.0;
  EpiState next_state;
  bool done = false;
};

// Bounded FIFO with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractError("ReplayBuffer: zero capacity");
  }

  void push(Transition t) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(t));
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const {
    if (n > items_.size()) throw ContractError("ReplayBuffer::sample: not enough transitions");
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(&items_[rng.below(items_.size())]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

struct Diagnostics {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  int critic_updates = 0;
  int actor_updates = 0;
};

struct EpisodeResult {
  double reward = 0.0;
  int steps = 0;
  Diagnostics diag;
};

// Common surface of every learner. One instance per client; parameters are
// the only state that is ever exported.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  virtual Action act(const EpiState& state, ActMode mode, Rng& rng) const = 0;

  // One local epoch: a full episode of interaction starting from
  // env.reset(seed), followed by (or interleaved with) the algorithm's
  // updates.
  virtual EpisodeResult train_episode(EpiEnv& env, std::uint64_t seed) = 0;

  virtual std::vector<nn::ParamVector> params() const = 0;
  virtual void load(const std::vector<nn::ParamVector>& params) = 0;
  virtual std::vector<std::string> network_names() const = 0;
  virtual std::vector<nn::MlpSpec> network_specs() const = 0;
  virtual std::unique_ptr<Agent> clone() const = 0;
};

// Plays one episode with a fixed policy; returns the cumulative reward.
inline double play_episode(const Agent& agent, EpiEnv& env, std::uint64_t seed, ActMode mode,
                           Rng& rng) {
  EpiState s = env.reset(seed);
  double total = 0.0;
  while (!env.done()) {
    const Action a = agent.act(s, mode, rng);
    const StepOutcome out = std::visit([&](const auto& x) { return env.step(x); }, a);
    total += out.reward;
    s = out.observation;
  }
  return total;
}

namespace detail {

inline void check_load(const std::vector<nn::ParamVector>& incoming,
                       const std::vector<nn::ParamVector>& current, const char* who) {
  if (incoming.size() != current.size())
    throw ContractError(std::string(who) + "::load: wrong number of networks");
  for (std::size_t i = 0; i < incoming.size(); ++i)
    nn::require_same_layout(incoming[i], current[i], who);
}

// target <- tau * online + (1 - tau) * target
inline void soft_update(nn::ParamVector& target, const nn::ParamVector& online, double tau) {
  nn::require_same_layout(target, online, "soft_update");
  for (std::size_t i = 0; i < target.values.size(); ++i)
    target.values[i] = tau * online.values[i] + (1.0 - tau) * target.values[i];
}

// Discounted returns with no bootstrap past a terminal transition.
inline std::vector<double> discounted_returns(std::span<const double> rewards,
                                              const std::vector<bool>& dones, double gamma,
                                              double bootstrap = 0.0) {
  std::vector<double> g(rewards.size());
  double running = bootstrap;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    if (dones[t]) running = 0.0;
    running = rewards[t] + gamma * running;
    g[t] = running;
  }
  return g;
}

}  // namespace detail

}  // namespace fedrl::agents
