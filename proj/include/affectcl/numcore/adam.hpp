#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "affectcl/numcore/network.hpp"

namespace affectcl::numcore {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  AdamState(std::size_t parameter_count, AdamConfig config);

  const AdamConfig& config() const noexcept { return config_; }
  std::uint64_t step_count() const noexcept { return step_; }
  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

 private:
  friend void adam_step(std::span<double>, std::span<const double>, AdamState&);
  friend void adam_step(Network&, const GradientBundle&, AdamState&);

  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t step_ = 0;
};

/// One bias-corrected Adam update. Throws NumericalError (leaving params and
/// state untouched) when any gradient entry is non-finite.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);
void adam_step(Network& net, const GradientBundle& grads, AdamState& state);

}  // namespace affectcl::numcore
