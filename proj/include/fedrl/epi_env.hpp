#pragma once

// Epidemic decision environment: seven intervention actions drive four
// epidemic rates, which move a compartment model one step forward and
// yield a health/economy reward.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fedrl/errors.hpp"
#include "fedrl/rng.hpp"

namespace fedrl {

inline constexpr std::size_t kNumActions = 7;
inline constexpr std::size_t kNumLevels = 4;
inline constexpr std::size_t kObsDim = 4;

// A1 travel restriction, A2 lockdown, A3 remote work/school, A4 masks,
// A5 testing, A6 health-care capacity, A7 vaccination.
enum ActionIndex : std::size_t {
  kTravel = 0,
  kLockdown = 1,
  kRemoteWork = 2,
  kMasks = 3,
  kTesting = 4,
  kHealthCare = 5,
  kVaccination = 6,
};

struct EnvConfig {
  double incubation_days = 14.0;
  double fatality_rate = 0.02;
  std::int64_t population = 100000;
  double initial_infected = 3.0;
  double density = 1000.0;
  double infection_threshold = 25.0;  // TI
  double death_threshold = 5.0;       // TD
  double reinfection_prob = 0.16;
  double vaccine_inefficacy = 0.61;
  std::array<double, kNumActions> weights{1, 1, 1, 1, 1, 1, 1};
  int horizon = 240;
  // Mitigation strength of travel, lockdown, remote work, masks, vaccination
  // on the transmission rate.
  std::array<double, 5> mitigation{0.15, 1.0, 0.125, 0.1, 0.15};
  double beta = 0.15;
  double density_ref = 1000.0;
  double incubation_scale = 28.0;
  // When set, continuous actions are applied verbatim instead of being
  // redrawn inside their band. Discrete levels are always band-sampled.
  bool exact_intensity = false;

  // Throws ConfigError naming the first offending field.
  void validate() const {
    auto unit = [](const char* key, double v) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must be in [0,1]");
    };
    auto positive = [](const char* key, double v) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive");
    };
    positive("incubation_days", incubation_days);
    unit("fatality_rate", fatality_rate);
    if (population <= 0) throw ConfigError("population", "must be positive");
    if (!(initial_infected >= 0.0) || !std::isfinite(initial_infected))
      throw ConfigError("initial_infected", "must be non-negative");
    positive("density", density);
    positive("infection_threshold", infection_threshold);
    positive("death_threshold", death_threshold);
    unit("reinfection_prob", reinfection_prob);
    unit("vaccine_inefficacy", vaccine_inefficacy);
    for (double w : weights) positive("weights", w);
    if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
    for (double c : mitigation) unit("mitigation", c);
    positive("beta", beta);
    positive("density_ref", density_ref);
    positive("incubation_scale", incubation_scale);
    if (!(incubation_days < incubation_scale))
      throw ConfigError("incubation_days", "must be below incubation_scale");
  }

  double max_episode_reward() const { return 2.0 * horizon; }

  bool operator==(const EnvConfig&) const = default;
};

// Discrete policy decision: one level in {0,1,2,3} per action.
struct ActionLevels {
  std::array<std::uint8_t, kNumActions> level{};

  static ActionLevels uniform(std::uint8_t l) {
    ActionLevels out;
    out.level.fill(l);
    return out;
  }
  bool operator==(const ActionLevels&) const = default;
};

// Realized continuous intensities in [0,1]^7.
struct ActionIntensity {
  std::array<double, kNumActions> a{};
  bool operator==(const ActionIntensity&) const = default;
};

// Observation: transmission, identification, death and reinfection rates.
struct EpiState {
  double transmission = 0.0;
  double identification = 0.0;
  double death = 0.0;
  double reinfection = 0.0;

  std::array<double, kObsDim> as_array() const {
    return {transmission, identification, death, reinfection};
  }
  bool operator==(const EpiState&) const = default;
};

// Population state. `dead` and `recovered` are the per-step flows the
// transition produces; `dead_total` accumulates deaths over the episode.
struct Compartments {
  double normal = 0.0;            // N
  double current_infected = 0.0;  // Cur_Inf
  double first_infected = 0.0;    // First_Inf
  double reinfected = 0.0;        // Re_Inf
  double next_infected = 0.0;     // Nxt_Inf
  double undiscovered = 0.0;      // U
  double known = 0.0;             // K
  double recovered = 0.0;         // R
  double dead = 0.0;              // D
  double dead_total = 0.0;

  bool operator==(const Compartments&) const = default;
};

struct RewardParts {
  double reward = 0.0;
  double health = 0.0;   // h
  double economy = 0.0;  // e
};

struct StepInfo {
  ActionLevels levels;
  ActionIntensity intensity;
  Compartments compartments;
  double health = 0.0;
  double economy = 0.0;
};

struct StepOutcome {
  EpiState observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct Band {
  double lo;
  double hi;
};

inline constexpr std::array<Band, kNumLevels> kIntensityBands{{
    {0.0, 0.2},
    {0.2, 0.5},
    {0.5, 0.75},
    {0.75, 1.0},
}};

// Band membership of a continuous intensity; values are clamped to [0,1].
inline std::uint8_t level_of(double intensity) {
  if (intensity < 0.2) return 0;
  if (intensity < 0.5) return 1;
  if (intensity < 0.75) return 2;
  return 3;
}

inline ActionLevels quantize(const ActionIntensity& x) {
  ActionLevels out;
  for (std::size_t i = 0; i < kNumActions; ++i) out.level[i] = level_of(x.a[i]);
  return out;
}

// Draws the realized intensity of each action uniformly from its level's
// band. Consumes exactly seven uniforms, in action order.
inline ActionIntensity sample_intensity(const ActionLevels& levels, Rng& rng) {
  ActionIntensity out;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    const Band band = kIntensityBands.at(levels.level[i]);
    out.a[i] = rng.uniform(band.lo, band.hi);
  }
  return out;
}

inline EpiState compute_rates(const ActionIntensity& act, const Compartments& comp,
                              const EnvConfig& cfg) {
  if (!(comp.normal > 0.0))
    throw std::domain_error("compute_rates: normal population is zero");
  const auto& a = act.a;
  const auto& c = cfg.mitigation;
  const double mitigation = (1.0 - c[0] * a[kTravel]) * (1.0 - c[1] * a[kLockdown]) *
                            (1.0 - c[2] * a[kRemoteWork]) * (1.0 - c[3] * a[kMasks]) *
                            (1.0 - c[4] * a[kVaccination]);
  EpiState s;
  s.transmission = std::clamp(cfg.beta * (cfg.density / cfg.density_ref) *
                                  (comp.current_infected / comp.normal) * mitigation,
                              0.0, 1.0);
  s.identification = a[kTesting] * (1.0 - cfg.incubation_days / cfg.incubation_scale);
  s.death = (1.0 - a[kHealthCare]) * cfg.fatality_rate;
  s.reinfection = (1.0 - a[kVaccination] * cfg.vaccine_inefficacy) * cfg.reinfection_prob;
  return s;
}

// One pass of the compartment flow. Assignments happen in order and each
// reads the latest values: infections surface, deaths leave the population,
// new and repeat infections form the next cohort, which splits into known and
// undiscovered carriers, and known carriers recover or die.
inline Compartments step_transition(const Compartments& prev, const EpiState& s) {
  Compartments c = prev;
  c.current_infected = c.current_infected + c.undiscovered;
  c.normal = c.normal - c.dead;
  c.first_infected = s.transmission * c.normal;
  c.reinfected = s.reinfection * c.recovered;
  c.next_infected = c.first_infected + c.reinfected;
  c.known = s.identification * c.next_infected;
  c.undiscovered = c.next_infected - c.known;
  c.dead = s.death * c.known;
  c.recovered = c.known - c.dead;

  auto nonneg = [](double& v) { v = std::max(v, 0.0); };
  nonneg(c.normal);
  nonneg(c.current_infected);
  nonneg(c.first_infected);
  nonneg(c.reinfected);
  nonneg(c.next_infected);
  nonneg(c.undiscovered);
  nonneg(c.known);
  nonneg(c.recovered);
  nonneg(c.dead);
  c.dead_total = prev.dead_total + c.dead;
  return c;
}

inline RewardParts compute_reward(double next_infected, double dead,
                                  const ActionIntensity& act, const EnvConfig& cfg) {
  RewardParts r;
  const double ti = cfg.infection_threshold;
  if (next_infected < ti && dead < cfg.death_threshold) r.health = (ti - next_infected) / ti;
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < kNumActions; ++i) {
    weighted += cfg.weights[i] * act.a[i];
    total += cfg.weights[i];
  }
  r.economy = 1.0 - weighted / total;
  r.reward = (r.health > 0.0 && r.economy > 0.0) ? r.health + r.economy : 0.0;
  return r;
}

// Episodic reset/step wrapper. Single owner; copyable so callers can fork a
// trajectory.
class EpiEnv {
 public:
  explicit EpiEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const EnvConfig& config() const { return cfg_; }
  const Compartments& compartments() const { return comp_; }
  int step_count() const { return steps_; }
  bool done() const { return done_; }

  EpiState reset(std::uint64_t seed) {
    rng_.reseed(seed);
    comp_ = Compartments{};
    comp_.normal = static_cast<double>(cfg_.population);
    comp_.current_infected = cfg_.initial_infected;
    steps_ = 0;
    done_ = false;
    started_ = true;
    return compute_rates(ActionIntensity{}, comp_, cfg_);
  }

  StepOutcome step(const ActionLevels& levels) {
    for (auto l : levels.level)
      if (l >= kNumLevels) throw ContractError("EpiEnv::step: action level out of range");
    return advance(levels, [&] { return sample_intensity(levels, rng_); });
  }

  // Continuous entry point: each intensity is mapped to its band and then
  // redrawn inside that band, so every action passes through the same
  // implementation noise as the discrete interface. With exact_intensity the
  // values are applied as given.
  StepOutcome step(const ActionIntensity& raw) {
    for (double v : raw.a)
      if (!(v >= 0.0 && v <= 1.0))
        throw ContractError("EpiEnv::step: intensity outside [0,1]");
    if (!cfg_.exact_intensity) return step(quantize(raw));
    return advance(quantize(raw), [&] { return raw; });
  }

 private:
  template <typename Realize>
  StepOutcome advance(const ActionLevels& levels, Realize realize) {
    if (!started_) throw ContractError("EpiEnv::step called before reset");
    if (done_) throw ContractError("EpiEnv::step called on a finished episode");

    StepOutcome out;
    out.info.levels = levels;
    ++steps_;
    if (!(comp_.normal > 0.0)) {
      // Extinct population: nothing left to simulate.
      done_ = true;
      out.done = true;
      out.info.compartments = comp_;
      return out;
    }
    out.info.intensity = realize();
    out.observation = compute_rates(out.info.intensity, comp_, cfg_);
    comp_ = step_transition(comp_, out.observation);
    const RewardParts r =
        compute_reward(comp_.next_infected, comp_.dead, out.info.intensity, cfg_);
    out.reward = r.reward;
    out.info.health = r.health;
    out.info.economy = r.economy;
    out.info.compartments = comp_;
    // An extinct population cannot be stepped again (rates divide by N).
    done_ = steps_ >= cfg_.horizon || !(comp_.normal > 0.0);
    out.done = done_;
    return out;
  }

 private:
  EnvConfig cfg_;
  Compartments comp_;
  Rng rng_;
  int steps_ = 0;
  bool done_ = false;
  bool started_ = false;
};

}  // namespace fedrl
