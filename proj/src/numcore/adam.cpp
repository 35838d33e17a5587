#include "affectcl/numcore/adam.hpp"

#include <cmath>

#include "affectcl/errors.hpp"

namespace affectcl::numcore {
namespace {

void validate(const AdamConfig& c) {
  if (!(c.lr > 0.0)) throw ConfigError("adam: lr must be > 0");
  if (!(c.beta1 > 0.0 && c.beta1 < 1.0)) throw ConfigError("adam: beta1 must be in (0,1)");
  if (!(c.beta2 > 0.0 && c.beta2 < 1.0)) throw ConfigError("adam: beta2 must be in (0,1)");
  if (!(c.eps > 0.0)) throw ConfigError("adam: eps must be > 0");
}

void require_finite(std::span<const double> grads) {
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericalError("adam: non-finite gradient at parameter " + std::to_string(i));
    }
  }
}

}  // namespace

AdamState::AdamState(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
  validate(config_);
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m_.size()) {
    throw ConfigError("adam_step: parameter/gradient/state sizes differ");
  }
  require_finite(grads);
  const auto& c = state.config_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m_[i] = c.beta1 * state.m_[i] + (1.0 - c.beta1) * g;
    state.v_[i] = c.beta2 * state.v_[i] + (1.0 - c.beta2) * g * g;
    const double mhat = state.m_[i] / bc1;
    const double vhat = state.v_[i] / bc2;
    params[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
}

void adam_step(Network& net, const GradientBundle& grads, AdamState& state) {
  if (grads.layers.size() != net.depth()) throw ConfigError("adam_step: gradient bundle depth mismatch");
  if (state.m_.size() != net.parameter_count()) throw ConfigError("adam_step: state size mismatch");
  for (const auto& l : grads.layers) {
    require_finite(l.weights.flat());
    require_finite(l.bias);
  }
  // per-layer updates share one moment buffer; step count advances once
  const auto& c = state.config_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  std::size_t off = 0;
  auto update = [&](std::span<double> p, std::span<const double> g) {
    if (p.size() != g.size()) throw ConfigError("adam_step: layer gradient shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i, ++off) {
      state.m_[off] = c.beta1 * state.m_[off] + (1.0 - c.beta1) * g[i];
      state.v_[off] = c.beta2 * state.v_[off] + (1.0 - c.beta2) * g[i] * g[i];
      p[i] -= c.lr * (state.m_[off] / bc1) / (std::sqrt(state.v_[off] / bc2) + c.eps);
    }
  };
  for (std::size_t li = 0; li < net.depth(); ++li) {
    auto& layer = net.mutable_layer(li);
    update(layer.weights.flat(), grads.layers[li].weights.flat());
    update(layer.bias, grads.layers[li].bias);
  }
}

}  // namespace affectcl::numcore
