#pragma once

// Seven independent 4-way categorical distributions over action levels,
// parameterized by 28 logits (dimension-major).

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "fedrl/epi_env.hpp"
#include "fedrl/rng.hpp"

namespace fedrl::agents {

inline constexpr std::size_t kLogitCount = kNumActions * kNumLevels;

using LevelProbs = std::array<std::array<double, kNumLevels>, kNumActions>;

inline LevelProbs softmax_levels(std::span<const double> logits) {
  LevelProbs p{};
  for (std::size_t d = 0; d < kNumActions; ++d) {
    const double* z = logits.data() + d * kNumLevels;
    const double zmax = *std::max_element(z, z + kNumLevels);
    double total = 0.0;
    for (std::size_t k = 0; k < kNumLevels; ++k) total += p[d][k] = std::exp(z[k] - zmax);
    for (auto& v : p[d]) v /= total;
  }
  return p;
}

// log pi(levels) = sum over dimensions of log softmax(z_d)[level_d].
inline double log_prob(std::span<const double> logits, const ActionLevels& levels) {
  double lp = 0.0;
  for (std::size_t d = 0; d < kNumActions; ++d) {
    const double* z = logits.data() + d * kNumLevels;
    const double zmax = *std::max_element(z, z + kNumLevels);
    double total = 0.0;
    for (std::size_t k = 0; k < kNumLevels; ++k) total += std::exp(z[k] - zmax);
    lp += z[levels.level[d]] - zmax - std::log(total);
  }
  return lp;
}

inline double entropy(const LevelProbs& p) {
  double h = 0.0;
  for (const auto& row : p)
    for (double v : row)
      if (v > 0.0) h -= v * std::log(v);
  return h;
}

// d log pi / d z = onehot(level) - p, per dimension.
inline void add_log_prob_grad(const LevelProbs& p, const ActionLevels& levels, double scale,
                              std::span<double> dz) {
  for (std::size_t d = 0; d < kNumActions; ++d)
    for (std::size_t k = 0; k < kNumLevels; ++k)
      dz[d * kNumLevels + k] += scale * ((levels.level[d] == k ? 1.0 : 0.0) - p[d][k]);
}

// dH/dz_k = -p_k (log p_k + H_d), per dimension.
inline void add_entropy_grad(const LevelProbs& p, double scale, std::span<double> dz) {
  for (std::size_t d = 0; d < kNumActions; ++d) {
    double h = 0.0;
    for (double v : p[d])
      if (v > 0.0) h -= v * std::log(v);
    for (std::size_t k = 0; k < kNumLevels; ++k) {
      const double v = p[d][k];
      const double logv = v > 0.0 ? std::log(v) : 0.0;
      dz[d * kNumLevels + k] += scale * (-v * (logv + h));
    }
  }
}

inline ActionLevels sample_levels(const LevelProbs& p, Rng& rng) {
  ActionLevels out;
  for (std::size_t d = 0; d < kNumActions; ++d) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::uint8_t chosen = kNumLevels - 1;
    for (std::size_t k = 0; k < kNumLevels; ++k) {
      acc += p[d][k];
      if (u < acc) {
        chosen = static_cast<std::uint8_t>(k);
        break;
      }
    }
    out.level[d] = chosen;
  }
  return out;
}

// Per-dimension argmax; ties go to the lowest level.
inline ActionLevels greedy_levels(std::span<const double> logits) {
  ActionLevels out;
  for (std::size_t d = 0; d < kNumActions; ++d) {
    const double* z = logits.data() + d * kNumLevels;
    std::uint8_t best = 0;
    for (std::uint8_t k = 1; k < kNumLevels; ++k)
      if (z[k] > z[best]) best = k;
    out.level[d] = best;
  }
  return out;
}

}  // namespace fedrl::agents
