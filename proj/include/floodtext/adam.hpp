#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "floodtext/error.hpp"
#include "floodtext/tensor.hpp"

namespace floodtext::nn {

struct AdamConfig {
  double beta1 = 0.7;
  double beta2 = 0.99;
  double eps = 1e-8;
};

// Bias-corrected adaptive-moment optimizer. Moment buffers and step counts
// are tracked per parameter name, so parameters that sit out early epochs
// (gradual unfreezing) start their own bias-correction clock when they join.
template <class T>
class AdamStateT {
 public:
  explicit AdamStateT(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }

  // One update of `param` from param.grad at learning rate `lr`.
  void step(const std::string& name, TensorT<T>& param, double lr) {
    auto& slot = slots_[name];
    if (slot.m.size() != param.numel()) {
      slot.m.assign(param.numel(), 0.0);
      slot.v.assign(param.numel(), 0.0);
      slot.steps = 0;
    }
    param.ensure_grad();
    ++slot.steps;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(slot.steps));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(slot.steps));
    for (std::size_t i = 0; i < param.numel(); ++i) {
      const double g = static_cast<double>(param.grad[i]);
      if (!std::isfinite(g)) {
        throw NumericsError("non-finite gradient in parameter '" + name + "'");
      }
      slot.m[i] = cfg_.beta1 * slot.m[i] + (1.0 - cfg_.beta1) * g;
      slot.v[i] = cfg_.beta2 * slot.v[i] + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = slot.m[i] / bc1;
      const double v_hat = slot.v[i] / bc2;
      param.values[i] = static_cast<T>(static_cast<double>(param.values[i]) -
                                       lr * m_hat / (std::sqrt(v_hat) + cfg_.eps));
    }
    check_finite(param, "parameter '" + name + "' after optimizer step");
  }

  long long steps(const std::string& name) const {
    auto it = slots_.find(name);
    return it == slots_.end() ? 0 : it->second.steps;
  }

 private:
  struct Slot {
    std::vector<double> m;
    std::vector<double> v;
    long long steps = 0;
  };

  AdamConfig cfg_;
  std::unordered_map<std::string, Slot> slots_;
};

using AdamState = AdamStateT<float>;

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
template <class T>
double clip_global_norm(const std::vector<TensorT<T>*>& params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) {
    for (T g : p->grad) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto* p : params) {
      for (T& g : p->grad) g *= scale;
    }
  }
  return norm;
}

}  // namespace floodtext::nn
