#include "affectcl/training/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "affectcl/errors.hpp"
#include "affectcl/log.hpp"
#include "affectcl/numcore/adam.hpp"
#include "affectcl/supcon/supcon.hpp"

namespace affectcl::training {
namespace {

using numcore::Activation;
using numcore::Network;

enum RngStream : std::uint32_t { encoder_init = 1, probe_init = 2, batch_order = 3 };

std::mt19937_64 rng_for(std::uint64_t seed, RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void check_labels(const Matrix& x, std::span<const int> labels, std::size_t min_classes) {
  if (x.rows() != labels.size()) throw ConfigError("training: features and labels differ in count");
  if (x.rows() < 2) throw ConfigError("training: need at least 2 samples");
  bool has[2] = {false, false};
  for (int l : labels) {
    if (l != 0 && l != 1) throw ConfigError("training: labels must be 0 or 1");
    has[l] = true;
  }
  if (min_classes == 2 && !(has[0] && has[1])) {
    throw TrainingError("training set contains a single class; cannot fit a classifier");
  }
}

Network make_probe(std::size_t in_dim, const TrainConfig& cfg) {
  auto rng = rng_for(cfg.seed, probe_init);
  return Network({numcore::make_dense_layer(in_dim, 2, Activation::softmax, rng)});
}

// Shared epoch loop: shuffles, batches, tracks the best snapshot, applies early stopping.
// `step` returns the batch loss, or NaN for a batch it skipped entirely.
template <class StepFn>
TrainReport run_epochs(std::size_t n, const TrainConfig& cfg, Network& net, StepFn&& step) {
  auto order_rng = rng_for(cfg.seed, batch_order);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  report.best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> best_params = net.parameters();

  while (true) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const double loss = step(idx);
      if (std::isnan(loss)) {
        ++report.degenerate_batches;
        continue;
      }
      if (!std::isfinite(loss)) throw NumericalError("training: non-finite batch loss");
      sum += loss;
      ++batches;
    }
    const double epoch_loss = batches ? sum / static_cast<double>(batches) : 0.0;
    report.epoch_loss.push_back(epoch_loss);
    if (epoch_loss < report.best_loss) {
      report.best_loss = epoch_loss;
      report.best_epoch = report.epoch_loss.size() - 1;
      best_params = net.parameters();
    }
    if (early_stop(report.epoch_loss, cfg.patience_epochs, cfg.max_epochs) == StopDecision::stop) {
      break;
    }
  }
  net.set_parameters(best_params);
  return report;
}

std::vector<int> gather_labels(std::span<const int> labels, std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
  return out;
}

// Mean cross-entropy of a batch and its gradient w.r.t. the logits.
double cross_entropy(const Matrix& logits, std::span<const int> labels, Matrix& grad) {
  const std::size_t b = logits.rows();
  grad.resize(b, logits.cols());
  double loss = 0.0;
  const double inv_b = 1.0 / static_cast<double>(b);
  for (std::size_t r = 0; r < b; ++r) {
    const auto z = logits.row(r);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    const auto y = static_cast<std::size_t>(labels[r]);
    loss += lse - z[y];
    auto g = grad.row(r);
    for (std::size_t k = 0; k < z.size(); ++k) {
      g[k] = (std::exp(z[k] - lse) - (k == y ? 1.0 : 0.0)) * inv_b;
    }
  }
  return loss * inv_b;
}

TrainedModel train_cross_entropy(Network net, const Matrix& x, std::span<const int> labels,
                                 const TrainConfig& cfg) {
  numcore::AdamState adam(net.parameter_count(), {cfg.lr, 0.9, 0.999, 1e-8});
  Matrix grad;
  auto report = run_epochs(x.rows(), cfg, net, [&](std::span<const std::size_t> idx) {
    const Matrix xb = x.gather_rows(idx);
    const auto yb = gather_labels(labels, idx);
    auto fwd = numcore::network_forward(xb, net, cfg.exec);
    const double loss = cross_entropy(fwd.cache.preactivations.back(), yb, grad);
    const auto grads = numcore::backward_from_logits(grad, fwd.cache, net, cfg.exec);
    numcore::adam_step(net, grads, adam);
    return loss;
  });
  return {std::move(net), std::move(report)};
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("train config: lr must be > 0");
  if (batch_size == 0) throw ConfigError("train config: batch_size must be > 0");
  if (!(temperature > 0.0)) throw ConfigError("train config: temperature must be > 0");
  if (patience_epochs == 0 || max_epochs == 0) {
    throw ConfigError("train config: patience and max_epochs must be > 0");
  }
  if (patience_epochs > max_epochs) throw ConfigError("train config: patience > max_epochs");
  if (hidden_units == 0) throw ConfigError("train config: hidden_units must be > 0");
}

StopDecision early_stop(std::span<const double> loss_history, std::size_t patience,
                        std::size_t max_epochs) {
  if (loss_history.empty()) throw ConfigError("early_stop: empty loss history");
  if (loss_history.size() >= max_epochs) return StopDecision::stop;
  std::size_t best = 0;
  for (std::size_t i = 1; i < loss_history.size(); ++i) {
    if (loss_history[i] < loss_history[best]) best = i;
  }
  const std::size_t since_best = loss_history.size() - 1 - best;
  return since_best >= patience ? StopDecision::stop : StopDecision::keep_going;
}

Network initial_encoder(std::size_t in_dim, const TrainConfig& cfg) {
  auto rng = rng_for(cfg.seed, encoder_init);
  return Network({numcore::make_dense_layer(in_dim, cfg.hidden_units, Activation::sigmoid, rng)});
}

TrainedModel train_encoder_scl(const Matrix& x, std::span<const int> labels,
                               const TrainConfig& cfg) {
  cfg.validate();
  check_labels(x, labels, 1);
  Network net = initial_encoder(x.cols(), cfg);
  numcore::AdamState adam(net.parameter_count(), {cfg.lr, 0.9, 0.999, 1e-8});

  std::size_t skipped = 0;
  auto report = run_epochs(x.rows(), cfg, net, [&](std::span<const std::size_t> idx) {
    if (idx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const auto yb = gather_labels(labels, idx);
    if (std::all_of(yb.begin(), yb.end(), [&](int l) { return l == yb.front(); })) {
      log::debug("scl: batch without negative pairs; loss 0, optimiser step skipped");
      ++skipped;
      return 0.0;
    }
    const Matrix xb = x.gather_rows(idx);
    auto fwd = numcore::network_forward(xb, net, cfg.exec);
    const auto sc =
        supcon::supcon_grad({fwd.output, yb, cfg.temperature}, cfg.exec);
    if (sc.loss.active_anchors == 0) {
      log::debug("scl: batch without positive pairs; loss 0, optimiser step skipped");
      ++skipped;
      return 0.0;
    }
    const auto grads = numcore::backward(sc.grad, fwd.cache, net, cfg.exec);
    numcore::adam_step(net, grads, adam);
    return sc.loss.total;
  });
  report.degenerate_batches += skipped;
  log::debug("scl: " + std::to_string(report.epoch_loss.size()) + " epochs, best loss " +
             std::to_string(report.best_loss));
  return {std::move(net), std::move(report)};
}

TrainedModel train_probe(const Network& encoder, const Matrix& x, std::span<const int> labels,
                         const TrainConfig& cfg) {
  cfg.validate();
  check_labels(x, labels, 2);
  // encoder is read once; the probe never sees its parameters
  const Matrix hidden = numcore::predict(x, encoder, cfg.exec);
  return train_cross_entropy(make_probe(hidden.cols(), cfg), hidden, labels, cfg);
}

TrainedModel train_end_to_end(const Matrix& x, std::span<const int> labels,
                              const TrainConfig& cfg) {
  cfg.validate();
  check_labels(x, labels, 2);
  Network net = numcore::stack(initial_encoder(x.cols(), cfg), make_probe(cfg.hidden_units, cfg));
  return train_cross_entropy(std::move(net), x, labels, cfg);
}

std::vector<int> predict_classes(const Network& net, const Matrix& x, Exec exec) {
  const Matrix out = numcore::predict(x, net, exec);
  std::vector<int> cls(out.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto row = out.row(r);
    cls[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return cls;
}

}  // namespace affectcl::training
