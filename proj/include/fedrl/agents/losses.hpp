#pragma once

// Scalar training objectives and their exact parameter gradients. Each loss
// is a pure function of the parameters it differentiates; any quantity that
// is held fixed during an update (advantages, Bellman targets, behavior
// log-probabilities) is passed in.

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include "fedrl/agents/categorical.hpp"
#include "fedrl/epi_env.hpp"
#include "fedrl/nn/mlp.hpp"

namespace fedrl::agents {

struct LossGrad {
  double loss = 0.0;
  nn::ParamVector grad;
};

using StateVec = std::array<double, kObsDim>;

inline StateVec to_input(const EpiState& s) { return s.as_array(); }

inline std::vector<double> critic_input(const EpiState& s, const ActionIntensity& a) {
  std::vector<double> x;
  x.reserve(kObsDim + kNumActions);
  for (double v : s.as_array()) x.push_back(v);
  for (double v : a.a) x.push_back(v);
  return x;
}

inline void require_batch(std::size_t n, std::size_t m, const char* what) {
  if (n == 0) throw ContractError(std::string(what) + ": empty batch");
  if (n != m) throw ContractError(std::string(what) + ": batch length mismatch");
}

// min(r * A, clip(r, 1 - eps, 1 + eps) * A)
inline double clipped_surrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

inline nn::Matrix state_inputs(std::span<const EpiState> states) {
  nn::Matrix x(states.size(), kObsDim);
  for (std::size_t t = 0; t < states.size(); ++t) {
    const auto a = states[t].as_array();
    std::copy(a.begin(), a.end(), x.row(t));
  }
  return x;
}

inline nn::Matrix critic_inputs(std::span<const EpiState> states,
                                std::span<const ActionIntensity> actions) {
  require_batch(states.size(), actions.size(), "critic_inputs");
  nn::Matrix x(states.size(), kObsDim + kNumActions);
  for (std::size_t t = 0; t < states.size(); ++t) {
    const auto s = states[t].as_array();
    std::copy(s.begin(), s.end(), x.row(t));
    std::copy(actions[t].a.begin(), actions[t].a.end(), x.row(t) + kObsDim);
  }
  return x;
}

// -(1/T) sum A_t log pi(a_t|s_t) - c_H (1/T) sum H(pi(.|s_t))
inline LossGrad a2c_actor_loss(const nn::MlpSpec& spec, const nn::ParamVector& params,
                               std::span<const EpiState> states,
                               std::span<const ActionLevels> actions,
                               std::span<const double> advantages, double entropy_coef) {
  require_batch(states.size(), actions.size(), "a2c_actor_loss");
  require_batch(states.size(), advantages.size(), "a2c_actor_loss");
  const double inv_t = 1.0 / static_cast<double>(states.size());
  LossGrad out{0.0, nn::ParamVector(params.layout)};
  nn::BatchTrace trace;
  nn::forward_batch(spec, params, state_inputs(states), trace);
  const nn::Matrix& logits = trace.act.back();
  nn::Matrix dz(states.size(), kLogitCount);
  for (std::size_t t = 0; t < states.size(); ++t) {
    const std::span<const double> z(logits.row(t), kLogitCount);
    const auto p = softmax_levels(z);
    out.loss -= inv_t * (advantages[t] * log_prob(z, actions[t]) + entropy_coef * entropy(p));
    const std::span<double> g(dz.row(t), kLogitCount);
    add_log_prob_grad(p, actions[t], -inv_t * advantages[t], g);
    add_entropy_grad(p, -inv_t * entropy_coef, g);
  }
  nn::backward_batch(spec, params, trace, dz, &out.grad, nullptr);
  return out;
}

// (1/T) sum (V(x_t) - y_t)^2 for a scalar-output network.
inline LossGrad value_loss(const nn::MlpSpec& spec, const nn::ParamVector& params,
                           const nn::Matrix& inputs, std::span<const double> targets) {
  require_batch(inputs.rows, targets.size(), "value_loss");
  const double inv_t = 1.0 / static_cast<double>(inputs.rows);
  LossGrad out{0.0, nn::ParamVector(params.layout)};
  nn::BatchTrace trace;
  nn::forward_batch(spec, params, inputs, trace);
  nn::Matrix dv(inputs.rows, 1);
  for (std::size_t t = 0; t < inputs.rows; ++t) {
    const double err = trace.act.back()(t, 0) - targets[t];
    out.loss += inv_t * err * err;
    dv(t, 0) = 2.0 * inv_t * err;
  }
  nn::backward_batch(spec, params, trace, dv, &out.grad, nullptr);
  return out;
}

// -(1/T) sum min(r A, clip(r) A) - c_H (1/T) sum H, with
// r = exp(log pi(a|s) - log pi_old(a|s)).
inline LossGrad ppo_actor_loss(const nn::MlpSpec& spec, const nn::ParamVector& params,
                               std::span<const EpiState> states,
                               std::span<const ActionLevels> actions,
                               std::span<const double> old_log_probs,
                               std::span<const double> advantages, double clip_eps,
                               double entropy_coef) {
  require_batch(states.size(), actions.size(), "ppo_actor_loss");
  require_batch(states.size(), old_log_probs.size(), "ppo_actor_loss");
  require_batch(states.size(), advantages.size(), "ppo_actor_loss");
  const double inv_t = 1.0 / static_cast<double>(states.size());
  LossGrad out{0.0, nn::ParamVector(params.layout)};
  nn::BatchTrace trace;
  nn::forward_batch(spec, params, state_inputs(states), trace);
  const nn::Matrix& logits = trace.act.back();
  nn::Matrix dz(states.size(), kLogitCount);
  for (std::size_t t = 0; t < states.size(); ++t) {
    const std::span<const double> z(logits.row(t), kLogitCount);
    const auto p = softmax_levels(z);
    const double ratio = std::exp(log_prob(z, actions[t]) - old_log_probs[t]);
    const double adv = advantages[t];
    out.loss -= inv_t * (clipped_surrogate(ratio, adv, clip_eps) + entropy_coef * entropy(p));
    const std::span<double> g(dz.row(t), kLogitCount);
    // The unclipped branch is active whenever r*A attains the minimum; the
    // clipped branch is constant in the parameters.
    const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
    if (ratio * adv <= clipped * adv) add_log_prob_grad(p, actions[t], -inv_t * adv * ratio, g);
    add_entropy_grad(p, -inv_t * entropy_coef, g);
  }
  nn::backward_batch(spec, params, trace, dz, &out.grad, nullptr);
  return out;
}

// -(1/T) sum Q(s_t, mu(s_t)), differentiated through the critic's action
// input into the actor parameters. The critic is held fixed.
inline LossGrad dpg_actor_loss(const nn::MlpSpec& actor_spec, const nn::ParamVector& actor,
                               const nn::MlpSpec& critic_spec, const nn::ParamVector& critic,
                               std::span<const EpiState> states) {
  if (states.empty()) throw ContractError("dpg_actor_loss: empty batch");
  const std::size_t n = states.size();
  const double inv_t = 1.0 / static_cast<double>(n);
  LossGrad out{0.0, nn::ParamVector(actor.layout)};
  nn::BatchTrace actor_trace, critic_trace;
  nn::forward_batch(actor_spec, actor, state_inputs(states), actor_trace);
  const nn::Matrix& mu = actor_trace.act.back();

  nn::Matrix q_in(n, kObsDim + kNumActions);
  for (std::size_t t = 0; t < n; ++t) {
    const auto s = states[t].as_array();
    std::copy(s.begin(), s.end(), q_in.row(t));
    std::copy(mu.row(t), mu.row(t) + kNumActions, q_in.row(t) + kObsDim);
  }
  nn::forward_batch(critic_spec, critic, q_in, critic_trace);
  for (std::size_t t = 0; t < n; ++t) out.loss -= inv_t * critic_trace.act.back()(t, 0);

  nn::Matrix dq(n, 1);
  std::fill(dq.data.begin(), dq.data.end(), -inv_t);
  nn::Matrix q_input_grad;
  nn::backward_batch(critic_spec, critic, critic_trace, dq, nullptr, &q_input_grad);
  nn::Matrix action_grad(n, kNumActions);
  for (std::size_t t = 0; t < n; ++t)
    std::copy(q_input_grad.row(t) + kObsDim, q_input_grad.row(t) + kObsDim + kNumActions,
              action_grad.row(t));
  nn::backward_batch(actor_spec, actor, actor_trace, action_grad, &out.grad, nullptr);
  return out;
}

}  // namespace fedrl::agents
