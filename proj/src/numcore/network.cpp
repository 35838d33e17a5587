#include "affectcl/numcore/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <string>

#include "affectcl/errors.hpp"

namespace affectcl::numcore {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ConfigError(std::string(what) + " contains a non-finite value");
  }
}

// dLoss/dpreact from dLoss/doutput, one row at a time.
void activation_backward(Activation a, std::span<const double> pre, std::span<const double> out,
                         std::span<const double> upstream, std::span<double> dz) {
  switch (a) {
    case Activation::identity:
      std::copy(upstream.begin(), upstream.end(), dz.begin());
      break;
    case Activation::sigmoid:
      // sigma(z) * sigma(-z) keeps precision in the saturated tails
      for (std::size_t k = 0; k < dz.size(); ++k) dz[k] = upstream[k] * out[k] * sigmoid(-pre[k]);
      break;
    case Activation::softmax: {
      double dot = 0.0;
      for (std::size_t k = 0; k < dz.size(); ++k) dot += upstream[k] * out[k];
      for (std::size_t k = 0; k < dz.size(); ++k) dz[k] = out[k] * (upstream[k] - dot);
      break;
    }
  }
}

void check_cache(const ForwardCache& cache, const Network& net) {
  if (cache.network_id != net.id() || cache.revision != net.revision() ||
      cache.inputs.size() != net.depth()) {
    throw InternalError("backward: forward cache is stale or belongs to another network");
  }
}

GradientBundle backward_impl(Matrix delta, const ForwardCache& cache, const Network& net,
                             Exec exec) {
  GradientBundle grads;
  grads.layers.resize(net.depth());
  for (std::size_t li = net.depth(); li-- > 0;) {
    const auto& layer = net.layer(li);
    auto& g = grads.layers[li];
    g.bias.assign(layer.out_dim(), 0.0);
    kernels::weight_grad(exec, delta, cache.inputs[li], g.weights, g.bias);
    if (li == 0) break;

    // delta for the previous layer: dL/dx = delta · W, then through its activation
    Matrix dx;
    kernels::matmul(exec, delta, layer.weights, dx);
    const auto& prev = net.layer(li - 1);
    Matrix next(dx.rows(), dx.cols());
    for (std::size_t r = 0; r < dx.rows(); ++r) {
      activation_backward(prev.activation, cache.preactivations[li - 1].row(r),
                          cache.outputs[li - 1].row(r), dx.row(r), next.row(r));
    }
    delta = std::move(next);
  }
  return grads;
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softmax: return "softmax";
  }
  return "?";
}

void DenseLayer::validate() const {
  if (weights.rows() == 0 || weights.cols() == 0) throw ConfigError("dense layer has no weights");
  if (bias.size() != weights.rows()) throw ConfigError("dense layer bias length != out_dim");
  require_finite(weights.flat(), "dense layer weights");
  require_finite(bias, "dense layer bias");
}

DenseLayer make_dense_layer(std::size_t in_dim, std::size_t out_dim, Activation activation,
                            std::mt19937_64& rng) {
  if (in_dim == 0 || out_dim == 0) throw ConfigError("dense layer dimensions must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  DenseLayer layer{Matrix(out_dim, in_dim), std::vector<double>(out_dim, 0.0), activation};
  for (auto& w : layer.weights.flat()) w = dist(rng);
  return layer;
}

void activate(Activation a, std::span<double> row) {
  switch (a) {
    case Activation::identity:
      break;
    case Activation::sigmoid:
      for (auto& v : row) v = sigmoid(v);
      break;
    case Activation::softmax: {
      const double mx = *std::max_element(row.begin(), row.end());
      double sum = 0.0;
      for (auto& v : row) {
        v = std::exp(v - mx);
        sum += v;
      }
      for (auto& v : row) v /= sum;
      break;
    }
  }
}

Matrix dense_forward(const Matrix& x, const DenseLayer& layer, Exec exec) {
  if (x.cols() != layer.in_dim()) {
    throw ConfigError("dense_forward: input width " + std::to_string(x.cols()) +
                      " != layer in_dim " + std::to_string(layer.in_dim()));
  }
  Matrix out;
  kernels::affine_rows(exec, x, layer.weights, layer.bias, out);
  for (std::size_t r = 0; r < out.rows(); ++r) activate(layer.activation, out.row(r));
  return out;
}

std::vector<double> dense_forward(std::span<const double> x, const DenseLayer& layer) {
  Matrix in(1, x.size());
  std::copy(x.begin(), x.end(), in.flat().begin());
  const Matrix out = dense_forward(in, layer);
  return {out.flat().begin(), out.flat().end()};
}

std::uint64_t Network::next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].validate();
    if (i > 0 && layers_[i].in_dim() != layers_[i - 1].out_dim()) {
      throw ConfigError("network: layer " + std::to_string(i) + " in_dim does not match previous out_dim");
    }
  }
}

Network::Network(const Network& other)
    : layers_(other.layers_), id_(next_id()), revision_(0) {}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    layers_ = other.layers_;
    id_ = next_id();
    revision_ = 0;
  }
  return *this;
}

DenseLayer& Network::mutable_layer(std::size_t i) {
  touch();
  return layers_.at(i);
}

std::size_t Network::in_dim() const {
  if (layers_.empty()) throw ConfigError("empty network");
  return layers_.front().in_dim();
}

std::size_t Network::out_dim() const {
  if (layers_.empty()) throw ConfigError("empty network");
  return layers_.back().out_dim();
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> Network::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    flat.insert(flat.end(), l.weights.flat().begin(), l.weights.flat().end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void Network::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw ConfigError("set_parameters: wrong parameter count");
  std::size_t off = 0;
  for (auto& l : layers_) {
    auto w = l.weights.flat();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), w.size(), w.begin());
    off += w.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), l.bias.size(), l.bias.begin());
    off += l.bias.size();
  }
  touch();
}

bool Network::same_parameters(const Network& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols() ||
        a.bias.size() != b.bias.size() || a.activation != b.activation) {
      return false;
    }
    if (std::memcmp(a.weights.flat().data(), b.weights.flat().data(),
                    a.weights.size() * sizeof(double)) != 0 ||
        std::memcmp(a.bias.data(), b.bias.data(), a.bias.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

Network stack(const Network& front, const Network& back) {
  std::vector<DenseLayer> layers = front.layers();
  layers.insert(layers.end(), back.layers().begin(), back.layers().end());
  return Network(std::move(layers));
}

ForwardResult network_forward(const Matrix& x, const Network& net, Exec exec) {
  if (net.depth() == 0) throw ConfigError("network_forward: empty network");
  ForwardResult res;
  res.cache.network_id = net.id();
  res.cache.revision = net.revision();
  Matrix current = x;
  for (const auto& layer : net.layers()) {
    if (current.cols() != layer.in_dim()) {
      throw ConfigError("network_forward: input width " + std::to_string(current.cols()) +
                        " != layer in_dim " + std::to_string(layer.in_dim()));
    }
    Matrix pre;
    kernels::affine_rows(exec, current, layer.weights, layer.bias, pre);
    Matrix out = pre;
    for (std::size_t r = 0; r < out.rows(); ++r) activate(layer.activation, out.row(r));
    res.cache.inputs.push_back(std::move(current));
    res.cache.preactivations.push_back(std::move(pre));
    current = out;
    res.cache.outputs.push_back(std::move(out));
  }
  res.output = std::move(current);
  return res;
}

Matrix predict(const Matrix& x, const Network& net, Exec exec) {
  if (net.depth() == 0) throw ConfigError("predict: empty network");
  Matrix current = dense_forward(x, net.layer(0), exec);
  for (std::size_t i = 1; i < net.depth(); ++i) current = dense_forward(current, net.layer(i), exec);
  return current;
}

std::vector<double> network_forward(std::span<const double> x, const Network& net) {
  Matrix in(1, x.size());
  std::copy(x.begin(), x.end(), in.flat().begin());
  const Matrix out = predict(in, net);
  return {out.flat().begin(), out.flat().end()};
}

std::vector<double> GradientBundle::flatten() const {
  std::vector<double> flat;
  for (const auto& l : layers) {
    flat.insert(flat.end(), l.weights.flat().begin(), l.weights.flat().end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

bool GradientBundle::all_finite() const {
  for (const auto& l : layers) {
    for (double v : l.weights.flat()) {
      if (!std::isfinite(v)) return false;
    }
    for (double v : l.bias) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

GradientBundle zero_gradients(const Network& net) {
  GradientBundle g;
  for (const auto& l : net.layers()) {
    g.layers.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)});
  }
  return g;
}

GradientBundle backward(const Matrix& output_grad, const ForwardCache& cache, const Network& net,
                        Exec exec) {
  check_cache(cache, net);
  const auto& last_out = cache.outputs.back();
  if (output_grad.rows() != last_out.rows() || output_grad.cols() != last_out.cols()) {
    throw ConfigError("backward: upstream gradient shape does not match network output");
  }
  const auto& last = net.layers().back();
  Matrix delta(output_grad.rows(), output_grad.cols());
  for (std::size_t r = 0; r < delta.rows(); ++r) {
    activation_backward(last.activation, cache.preactivations.back().row(r), last_out.row(r),
                        output_grad.row(r), delta.row(r));
  }
  return backward_impl(std::move(delta), cache, net, exec);
}

GradientBundle backward_from_logits(const Matrix& logit_grad, const ForwardCache& cache,
                                    const Network& net, Exec exec) {
  check_cache(cache, net);
  const auto& last_pre = cache.preactivations.back();
  if (logit_grad.rows() != last_pre.rows() || logit_grad.cols() != last_pre.cols()) {
    throw ConfigError("backward_from_logits: gradient shape does not match network output");
  }
  return backward_impl(logit_grad, cache, net, exec);
}

}  // namespace affectcl::numcore
