#pragma once

#include <cmath>

#include "fedrl/nn/param_vector.hpp"

namespace fedrl::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer bound to one parameter layout. Moment buffers
// are created lazily on the first step.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  long steps() const { return t_; }

  // Descends along `grad` in place.
  void step(ParamVector& params, const ParamVector& grad) {
    require_same_layout(params, grad, "Adam::step");
    if (m_.layout.empty()) {
      m_ = ParamVector(params.layout);
      v_ = ParamVector(params.layout);
    }
    require_same_layout(params, m_, "Adam::step");
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.values.size(); ++i) {
      const double g = grad.values[i];
      double& m = m_.values[i];
      double& v = v_.values[i];
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
      params.values[i] -= cfg_.lr * (m / c1) / (std::sqrt(v / c2) + cfg_.eps);
    }
  }

  void reset() {
    m_ = ParamVector();
    v_ = ParamVector();
    t_ = 0;
  }

 private:
  AdamConfig cfg_;
  ParamVector m_;
  ParamVector v_;
  long t_ = 0;
};

}  // namespace fedrl::nn
