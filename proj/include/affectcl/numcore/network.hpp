#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "affectcl/kernels.hpp"
#include "affectcl/matrix.hpp"

namespace affectcl::numcore {

enum class Activation { identity, sigmoid, softmax };

std::string_view to_string(Activation a);

struct DenseLayer {
  Matrix weights;             // out_dim × in_dim
  std::vector<double> bias;   // out_dim
  Activation activation = Activation::identity;

  std::size_t in_dim() const noexcept { return weights.cols(); }
  std::size_t out_dim() const noexcept { return weights.rows(); }

  /// Throws ConfigError on inconsistent shapes or non-finite entries.
  void validate() const;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Weights uniform in ±1/sqrt(in_dim), zero bias.
DenseLayer make_dense_layer(std::size_t in_dim, std::size_t out_dim, Activation activation,
                            std::mt19937_64& rng);

/// Applies the activation in place to one row of pre-activations.
void activate(Activation a, std::span<double> row);

std::vector<double> dense_forward(std::span<const double> x, const DenseLayer& layer);
Matrix dense_forward(const Matrix& x, const DenseLayer& layer, Exec exec = Exec::serial);

/// A chain of dense layers. Every mutation bumps the revision so that forward
/// caches taken before the mutation are rejected by backward().
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<DenseLayer> layers);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }
  DenseLayer& mutable_layer(std::size_t i);

  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t in_dim() const;
  std::size_t out_dim() const;

  std::size_t parameter_count() const noexcept;
  /// Layer by layer: weights row-major, then bias.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  std::uint64_t id() const noexcept { return id_; }
  std::uint64_t revision() const noexcept { return revision_; }
  void touch() noexcept { ++revision_; }

  /// Bitwise parameter equality (used for the frozen-encoder contract).
  bool same_parameters(const Network& other) const;

 private:
  std::vector<DenseLayer> layers_;
  std::uint64_t id_ = next_id();
  std::uint64_t revision_ = 0;

  static std::uint64_t next_id();
};

/// Concatenates two networks (e.g. a frozen encoder and its probe).
Network stack(const Network& front, const Network& back);

struct ForwardCache {
  std::uint64_t network_id = 0;
  std::uint64_t revision = 0;
  std::vector<Matrix> inputs;       // input of each layer
  std::vector<Matrix> preactivations;
  std::vector<Matrix> outputs;      // post-activation
};

struct ForwardResult {
  Matrix output;
  ForwardCache cache;
};

ForwardResult network_forward(const Matrix& x, const Network& net, Exec exec = Exec::serial);
/// Output only, no cache retained.
Matrix predict(const Matrix& x, const Network& net, Exec exec = Exec::serial);
std::vector<double> network_forward(std::span<const double> x, const Network& net);

struct LayerGradient {
  Matrix weights;
  std::vector<double> bias;
};

struct GradientBundle {
  std::vector<LayerGradient> layers;

  std::vector<double> flatten() const;
  bool all_finite() const;
};

/// Gradient bundle of zeros shaped like `net`.
GradientBundle zero_gradients(const Network& net);

/// Exact partials given dLoss/dOutput of the last layer (batch × out_dim).
GradientBundle backward(const Matrix& output_grad, const ForwardCache& cache, const Network& net,
                        Exec exec = Exec::serial);

/// Same, but the upstream gradient is taken with respect to the last layer's
/// pre-activation (softmax + cross-entropy shortcut).
GradientBundle backward_from_logits(const Matrix& logit_grad, const ForwardCache& cache,
                                    const Network& net, Exec exec = Exec::serial);

}  // namespace affectcl::numcore
