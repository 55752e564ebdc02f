#pragma once

// Federated averaging over RL agents. Each round a random subset of clients
// receives the global parameters, trains locally against its own private
// environment, and returns only parameters; the server averages them into
// the next global model. A centralized trainer with the same evaluation
// cadence serves as the baseline.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fedrl/agents/factory.hpp"
#include "fedrl/epi_env.hpp"
#include "fedrl/errors.hpp"
#include "fedrl/metrics.hpp"
#include "fedrl/nn/param_vector.hpp"
#include "fedrl/rng.hpp"

namespace fedrl::federation {

using agents::AgentConfig;
using agents::AgentKind;

struct FedConfig {
  int n_clients = 10;
  int k_selected = 5;
  int local_epochs = 3;
  int global_epochs = 20;
  AgentKind agent = AgentKind::kA2C;
  // Per-client environment overrides; empty means every client uses the
  // base environment (with its own seed stream).
  std::vector<EnvConfig> client_envs;
  std::uint64_t master_seed = 0;
  // Train the selected clients of a round concurrently. Results do not
  // depend on this flag.
  bool parallel = false;

  void validate() const {
    if (n_clients < 1) throw ConfigError("federation.n_clients", "must be >= 1");
    if (k_selected < 1 || k_selected > n_clients)
      throw ConfigError("federation.k_selected", "must satisfy 1 <= k <= n_clients");
    if (local_epochs < 1) throw ConfigError("federation.local_epochs", "must be >= 1");
    if (global_epochs < 0) throw ConfigError("federation.global_epochs", "must be >= 0");
    if (!client_envs.empty() && client_envs.size() != static_cast<std::size_t>(n_clients))
      throw ConfigError("federation.client_envs", "needs one entry per client");
    for (const auto& e : client_envs) e.validate();
  }

  bool operator==(const FedConfig&) const = default;
};

struct EvalConfig {
  int episodes = 5;

  bool operator==(const EvalConfig&) const = default;
};

// Everything a run needs besides output plumbing.
struct RunSetup {
  EnvConfig env;
  FedConfig fed;
  AgentConfig agent;
  EvalConfig eval;

  void validate() const {
    env.validate();
    fed.validate();
    agent.validate();
    if (eval.episodes < 1) throw ConfigError("eval_episodes", "must be >= 1");
  }

  const EnvConfig& client_env(int id) const {
    return fed.client_envs.empty() ? env : fed.client_envs.at(static_cast<std::size_t>(id));
  }

  bool operator==(const RunSetup&) const = default;
};

// Uniform sample of k distinct ids from [0, n), returned in ascending order.
inline std::vector<int> select_clients(int n, int k, Rng& rng) {
  if (n < 1) throw ContractError("select_clients: n must be >= 1");
  if (k < 1 || k > n) throw ContractError("select_clients: k must satisfy 1 <= k <= n");
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(k));
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct ClientHandle {
  int id = 0;
  EpiEnv env;
  std::unique_ptr<agents::Agent> agent;
  Rng rng;  // episode seeds
  int epochs_done = 0;
};

inline ClientHandle make_client(const RunSetup& setup, int id) {
  const std::uint64_t master = setup.fed.master_seed;
  const auto uid = static_cast<std::uint64_t>(id);
  return ClientHandle{id, EpiEnv(setup.client_env(id)),
                      agents::make_agent(setup.fed.agent, setup.agent,
                                         derive_seed(master, streams::kAgent, uid)),
                      Rng(derive_seed(master, streams::kEnv, uid)), 0};
}

// What leaves a client after local training: parameters and its own episode
// rewards. No transitions, states or actions.
struct LocalUpdate {
  int client_id = 0;
  std::vector<nn::ParamVector> params;
  std::vector<double> episode_rewards;
};

inline LocalUpdate local_train(ClientHandle& client, int epochs) {
  LocalUpdate out{client.id, {}, {}};
  for (int e = 0; e < epochs; ++e) {
    const std::uint64_t seed = client.rng.next_u64();
    out.episode_rewards.push_back(client.agent->train_episode(client.env, seed).reward);
    ++client.epochs_done;
  }
  out.params = client.agent->params();
  return out;
}

struct GlobalModel {
  std::vector<nn::ParamVector> params;
  int round = 0;
};

// Uniform per-network mean of the client parameters; the result does not
// depend on the order of `updates`.
inline GlobalModel aggregate(const GlobalModel& global, const std::vector<LocalUpdate>& updates) {
  if (updates.empty()) throw ContractError("aggregate: no client updates");
  GlobalModel next{{}, global.round + 1};
  const std::size_t networks = global.params.size();
  std::vector<nn::ParamVector> column;
  column.reserve(updates.size());
  for (std::size_t n = 0; n < networks; ++n) {
    column.clear();
    for (const auto& u : updates) {
      if (u.params.size() != networks)
        throw ContractError("aggregate: client " + std::to_string(u.client_id) +
                            " returned the wrong number of networks");
      nn::require_same_layout(global.params[n], u.params[n], "aggregate");
      column.push_back(u.params[n]);
    }
    next.params.push_back(nn::average_params(column));
  }
  return next;
}

// Mean greedy-mode return over `eval.episodes` episodes on environments
// seeded from a stream that no training client ever uses.
inline double evaluate_agent(const agents::Agent& agent, const EnvConfig& env_cfg,
                             const EvalConfig& eval, std::uint64_t master_seed) {
  EpiEnv env(env_cfg);
  double total = 0.0;
  for (int j = 0; j < eval.episodes; ++j) {
    const auto uj = static_cast<std::uint64_t>(j);
    Rng act_rng(derive_seed(master_seed, streams::kEval, 1000 + uj));
    total += agents::play_episode(agent, env, derive_seed(master_seed, streams::kEval, uj),
                                  agents::ActMode::kGreedy, act_rng);
  }
  return total / eval.episodes;
}

inline double evaluate(const std::vector<nn::ParamVector>& params, AgentKind kind,
                       const AgentConfig& agent_cfg, const EnvConfig& env_cfg,
                       const EvalConfig& eval, std::uint64_t master_seed) {
  auto agent = agents::make_agent(kind, agent_cfg, 0);
  agent->load(params);
  return evaluate_agent(*agent, env_cfg, eval, master_seed);
}

inline GlobalModel initial_global(const RunSetup& setup) {
  auto seed_agent = agents::make_agent(setup.fed.agent, setup.agent,
                                       derive_seed(setup.fed.master_seed, streams::kInit));
  return GlobalModel{seed_agent->params(), 0};
}

struct RunResult {
  GlobalModel final_model;
  std::vector<RoundRecord> records;
};

using RoundObserver = std::function<void(const GlobalModel&)>;

inline RunResult run_federated(const RunSetup& setup, const RoundObserver& on_round = {}) {
  setup.validate();
  const auto& fed = setup.fed;
  RunResult result{initial_global(setup), {}};

  std::vector<ClientHandle> clients;
  clients.reserve(static_cast<std::size_t>(fed.n_clients));
  for (int i = 0; i < fed.n_clients; ++i) clients.push_back(make_client(setup, i));
  Rng select_rng(derive_seed(fed.master_seed, streams::kSelect));

  for (int round = 1; round <= fed.global_epochs; ++round) {
    try {
      const std::vector<int> selected = select_clients(fed.n_clients, fed.k_selected, select_rng);
      auto train_one = [&](int id) {
        ClientHandle& c = clients[static_cast<std::size_t>(id)];
        c.agent->load(result.final_model.params);
        return local_train(c, fed.local_epochs);
      };

      std::vector<LocalUpdate> updates;
      updates.reserve(selected.size());
      if (fed.parallel && selected.size() > 1) {
        std::vector<std::future<LocalUpdate>> pending;
        for (int id : selected) pending.push_back(std::async(std::launch::async, train_one, id));
        for (auto& f : pending) updates.push_back(f.get());
      } else {
        for (int id : selected) updates.push_back(train_one(id));
      }

      for (const auto& u : updates) {
        const int base = clients[static_cast<std::size_t>(u.client_id)].epochs_done -
                         static_cast<int>(u.episode_rewards.size());
        for (std::size_t e = 0; e < u.episode_rewards.size(); ++e)
          result.records.push_back({round, "client", u.client_id, Phase::kTrain,
                                    u.episode_rewards[e], base + static_cast<int>(e) + 1});
      }

      result.final_model = aggregate(result.final_model, updates);
      const double reward = evaluate(result.final_model.params, fed.agent, setup.agent,
                                     setup.env, setup.eval, fed.master_seed);
      result.records.push_back(
          {round, "global", std::nullopt, Phase::kEval, reward, setup.eval.episodes});
      if (on_round) on_round(result.final_model);
    } catch (const std::exception& e) {
      throw std::runtime_error("federated round " + std::to_string(round) + ": " + e.what());
    }
  }
  return result;
}

// One agent on one environment (client 0's streams) for
// global_epochs * local_epochs episodes, evaluated every local_epochs
// episodes so its axis lines up with federated rounds.
inline RunResult run_centralized(const RunSetup& setup, const RoundObserver& on_round = {}) {
  setup.validate();
  const auto& fed = setup.fed;
  RunResult result{initial_global(setup), {}};
  ClientHandle center = make_client(setup, 0);
  center.agent->load(result.final_model.params);

  for (int round = 1; round <= fed.global_epochs; ++round) {
    try {
      const LocalUpdate u = local_train(center, fed.local_epochs);
      const int base = center.epochs_done - static_cast<int>(u.episode_rewards.size());
      for (std::size_t e = 0; e < u.episode_rewards.size(); ++e)
        result.records.push_back({round, "center", std::nullopt, Phase::kTrain,
                                  u.episode_rewards[e], base + static_cast<int>(e) + 1});
      result.final_model = GlobalModel{u.params, round};
      const double reward = evaluate(result.final_model.params, fed.agent, setup.agent,
                                     setup.env, setup.eval, fed.master_seed);
      result.records.push_back(
          {round, "center", std::nullopt, Phase::kEval, reward, setup.eval.episodes});
      if (on_round) on_round(result.final_model);
    } catch (const std::exception& e) {
      throw std::runtime_error("centralized round " + std::to_string(round) + ": " + e.what());
    }
  }
  return result;
}

}  // namespace fedrl::federation
