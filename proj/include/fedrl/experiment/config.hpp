#pragma once

// JSON run configuration. Every section is optional; absent keys keep their
// defaults and unknown keys are rejected with the dotted path of the key.
//
//   {
//     "seed": 0, "eval_episodes": 5, "out_dir": "runs", "parallel": false,
//     "env":        { "population": 100000, "weights": [1,1,1,1,1,1,1], ... },
//     "federation": { "n_clients": 10, "k_selected": 5, "local_epochs": 3,
//                     "global_epochs": 20, "client_envs": [ {...}, ... ] },
//     "agent":      { "algorithm": "a2c", "hidden": [64,64], "gamma": 0.8, ... }
//   }
//
// client_envs entries are partial env objects layered over "env".

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "fedrl/federation.hpp"
#include "json.hpp"

namespace fedrl::experiment {

using json = nlohmann::ordered_json;

struct RunConfig {
  federation::RunSetup setup;
  std::string out_dir = "runs";

  void validate() const {
    try {
      setup.env.validate();
    } catch (const ConfigError& e) {
      throw e.nested("env");
    }
    setup.fed.validate();
    setup.agent.validate();
    if (setup.eval.episodes < 1) throw ConfigError("eval_episodes", "must be >= 1");
    if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
  }

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

// Reads keys out of one JSON object and remembers which were consumed.
class Section {
 public:
  Section(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(name(), "must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(path(key), "must be a boolean");
      out = it->template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(path(key), "must be an integer");
      if (it->is_number_unsigned()) {
        const auto v = it->template get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
          throw ConfigError(path(key), "out of range");
        out = static_cast<T>(v);
      } else {
        const auto v = it->template get<std::int64_t>();
        if (v < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
            (v > 0 && static_cast<std::uint64_t>(v) > static_cast<std::uint64_t>(std::numeric_limits<T>::max())))
          throw ConfigError(path(key), "out of range");
        out = static_cast<T>(v);
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(path(key), "must be a number");
      out = it->template get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(path(key), "must be a string");
      out = it->template get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

  template <class T, std::size_t N>
  void get(const char* key, std::array<T, N>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_array() || it->size() != N)
      throw ConfigError(path(key), "must be an array of " + std::to_string(N) + " numbers");
    for (std::size_t i = 0; i < N; ++i) {
      if (!(*it)[i].is_number()) throw ConfigError(path(key), "must contain numbers");
      out[i] = (*it)[i].template get<T>();
    }
  }

  void get(const char* key, std::vector<std::uint32_t>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_array()) throw ConfigError(path(key), "must be an array of widths");
    out.clear();
    for (const auto& v : *it) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 1u << 20)
        throw ConfigError(path(key), "widths must be positive integers");
      out.push_back(v.get<std::uint32_t>());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()), "unknown key");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  std::string name() const { return prefix_.empty() ? "<root>" : prefix_; }

  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

inline void read_env(const json& j, const std::string& prefix, EnvConfig& e) {
  Section s(j, prefix);
  s.get("incubation_days", e.incubation_days);
  s.get("fatality_rate", e.fatality_rate);
  s.get("population", e.population);
  s.get("initial_infected", e.initial_infected);
  s.get("density", e.density);
  s.get("infection_threshold", e.infection_threshold);
  s.get("death_threshold", e.death_threshold);
  s.get("reinfection_prob", e.reinfection_prob);
  s.get("vaccine_inefficacy", e.vaccine_inefficacy);
  s.get("weights", e.weights);
  s.get("horizon", e.horizon);
  s.get("mitigation", e.mitigation);
  s.get("beta", e.beta);
  s.get("density_ref", e.density_ref);
  s.get("incubation_scale", e.incubation_scale);
  s.get("exact_intensity", e.exact_intensity);
  s.finish();
}

inline json env_json(const EnvConfig& e) {
  return json{{"incubation_days", e.incubation_days},
              {"fatality_rate", e.fatality_rate},
              {"population", e.population},
              {"initial_infected", e.initial_infected},
              {"density", e.density},
              {"infection_threshold", e.infection_threshold},
              {"death_threshold", e.death_threshold},
              {"reinfection_prob", e.reinfection_prob},
              {"vaccine_inefficacy", e.vaccine_inefficacy},
              {"weights", e.weights},
              {"horizon", e.horizon},
              {"mitigation", e.mitigation},
              {"beta", e.beta},
              {"density_ref", e.density_ref},
              {"incubation_scale", e.incubation_scale},
              {"exact_intensity", e.exact_intensity}};
}

}  // namespace detail

inline json to_json(const RunConfig& c) {
  const auto& fed = c.setup.fed;
  const auto& a = c.setup.agent;
  json clients = json::array();
  for (const auto& e : fed.client_envs) clients.push_back(detail::env_json(e));
  return json{
      {"seed", fed.master_seed},
      {"eval_episodes", c.setup.eval.episodes},
      {"out_dir", c.out_dir},
      {"parallel", fed.parallel},
      {"env", detail::env_json(c.setup.env)},
      {"federation",
       {{"n_clients", fed.n_clients},
        {"k_selected", fed.k_selected},
        {"local_epochs", fed.local_epochs},
        {"global_epochs", fed.global_epochs},
        {"client_envs", clients}}},
      {"agent",
       {{"algorithm", std::string(agents::to_string(fed.agent))},
        {"hidden", a.hidden},
        {"gamma", a.gamma},
        {"actor_lr", a.actor_lr},
        {"critic_lr", a.critic_lr},
        {"entropy_coef", a.entropy_coef},
        {"value_coef", a.value_coef},
        {"normalize_advantage", a.normalize_advantage},
        {"ppo_epochs", a.ppo_epochs},
        {"clip_eps", a.clip_eps},
        {"tau", a.tau},
        {"explore_noise", a.explore_noise},
        {"target_noise", a.target_noise},
        {"target_noise_clip", a.target_noise_clip},
        {"policy_delay", a.policy_delay},
        {"replay_capacity", a.replay_capacity},
        {"batch_size", a.batch_size}}}};
}

// Applies `j` over the defaults and validates the result.
inline RunConfig from_json(const json& j) {
  RunConfig c;
  auto& fed = c.setup.fed;
  auto& a = c.setup.agent;
  detail::Section root(j, "");
  root.get("seed", fed.master_seed);
  root.get("eval_episodes", c.setup.eval.episodes);
  root.get("out_dir", c.out_dir);
  root.get("parallel", fed.parallel);
  if (const json* env = root.child("env")) detail::read_env(*env, "env", c.setup.env);

  if (const json* f = root.child("federation")) {
    detail::Section s(*f, "federation");
    s.get("n_clients", fed.n_clients);
    s.get("k_selected", fed.k_selected);
    s.get("local_epochs", fed.local_epochs);
    s.get("global_epochs", fed.global_epochs);
    if (const json* list = s.child("client_envs")) {
      if (!list->is_array()) throw ConfigError("federation.client_envs", "must be an array");
      fed.client_envs.clear();
      for (std::size_t i = 0; i < list->size(); ++i) {
        EnvConfig e = c.setup.env;
        const std::string prefix = "federation.client_envs[" + std::to_string(i) + "]";
        detail::read_env((*list)[i], prefix, e);
        try {
          e.validate();
        } catch (const ConfigError& err) {
          throw err.nested(prefix);
        }
        fed.client_envs.push_back(e);
      }
    }
    s.finish();
  }

  if (const json* ag = root.child("agent")) {
    detail::Section s(*ag, "agent");
    std::string algo(agents::to_string(fed.agent));
    s.get("algorithm", algo);
    const auto kind = agents::parse_agent_kind(algo);
    if (!kind) throw ConfigError("agent.algorithm", "unknown algorithm '" + algo + "'");
    fed.agent = *kind;
    s.get("hidden", a.hidden);
    s.get("gamma", a.gamma);
    s.get("actor_lr", a.actor_lr);
    s.get("critic_lr", a.critic_lr);
    s.get("entropy_coef", a.entropy_coef);
    s.get("value_coef", a.value_coef);
    s.get("normalize_advantage", a.normalize_advantage);
    s.get("ppo_epochs", a.ppo_epochs);
    s.get("clip_eps", a.clip_eps);
    s.get("tau", a.tau);
    s.get("explore_noise", a.explore_noise);
    s.get("target_noise", a.target_noise);
    s.get("target_noise_clip", a.target_noise_clip);
    s.get("policy_delay", a.policy_delay);
    s.get("replay_capacity", a.replay_capacity);
    s.get("batch_size", a.batch_size);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

inline RunConfig parse_config(const std::string& text, const std::string& source = "config") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source, std::string("parse error: ") + e.what());
  }
  return from_json(j);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

inline std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

// Writes the effective configuration as <dir>/config.json.
inline std::filesystem::path write_config_echo(const RunConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "config.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << dump_config(c);
  return path;
}

}  // namespace fedrl::experiment
