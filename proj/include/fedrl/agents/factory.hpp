#pragma once

#include <memory>

#include "fedrl/agents/a2c.hpp"
#include "fedrl/agents/ddpg.hpp"
#include "fedrl/agents/ppo.hpp"
#include "fedrl/agents/td3.hpp"

namespace fedrl::agents {

// Uniform-random levels with no parameters and no learning; the reference
// baseline for learning-signal checks.
class RandomAgent final : public Agent {
 public:
  AgentKind kind() const override { return AgentKind::kRandom; }

  Action act(const EpiState&, ActMode, Rng& rng) const override {
    ActionLevels a;
    for (auto& l : a.level) l = static_cast<std::uint8_t>(rng.below(kNumLevels));
    return a;
  }

  EpisodeResult train_episode(EpiEnv& env, std::uint64_t seed) override {
    Rng rng(seed);
    EpisodeResult res;
    EpiState s = env.reset(seed);
    while (!env.done()) {
      const StepOutcome out = env.step(std::get<ActionLevels>(act(s, ActMode::kStochastic, rng)));
      res.reward += out.reward;
      ++res.steps;
      s = out.observation;
    }
    return res;
  }

  std::vector<nn::ParamVector> params() const override { return {}; }
  void load(const std::vector<nn::ParamVector>& p) override {
    if (!p.empty()) throw ContractError("RandomAgent::load: has no parameters");
  }
  std::vector<std::string> network_names() const override { return {}; }
  std::vector<nn::MlpSpec> network_specs() const override { return {}; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<RandomAgent>(*this); }
};

inline std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& cfg,
                                         std::uint64_t seed) {
  switch (kind) {
    case AgentKind::kA2C: return std::make_unique<A2CAgent>(cfg, seed);
    case AgentKind::kPPO: return std::make_unique<PPOAgent>(cfg, seed);
    case AgentKind::kDDPG: return std::make_unique<DDPGAgent>(cfg, seed);
    case AgentKind::kTD3: return std::make_unique<TD3Agent>(cfg, seed);
    case AgentKind::kRandom: return std::make_unique<RandomAgent>();
  }
  throw ContractError("make_agent: unknown agent kind");
}

}  // namespace fedrl::agents
