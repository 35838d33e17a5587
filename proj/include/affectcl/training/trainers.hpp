#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "affectcl/kernels.hpp"
#include "affectcl/matrix.hpp"
#include "affectcl/numcore/network.hpp"

namespace affectcl::training {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 256;
  double temperature = 0.1;
  std::size_t patience_epochs = 10;
  std::size_t max_epochs = 500;
  std::uint64_t seed = 0;
  std::size_t hidden_units = 30;
  Exec exec = Exec::serial;

  void validate() const;
};

enum class StopDecision { keep_going, stop };

/// Stop once the minimum epoch loss is `patience` epochs old, or at max_epochs.
StopDecision early_stop(std::span<const double> loss_history, std::size_t patience,
                        std::size_t max_epochs);

struct TrainReport {
  std::vector<double> epoch_loss;
  std::size_t best_epoch = 0;  // index into epoch_loss of the returned snapshot
  double best_loss = 0.0;
  std::size_t degenerate_batches = 0;  // too small, or without a positive or a negative pair
};

struct TrainedModel {
  numcore::Network net;
  TrainReport report;
};

/// Encoder of `hidden_units` sigmoid units trained with the supervised
/// contrastive loss on in-batch pairs. Batches holding a single category carry
/// no contrast and are skipped with loss 0. Returns the best-epoch snapshot.
TrainedModel train_encoder_scl(const Matrix& x, std::span<const int> labels,
                               const TrainConfig& cfg);

/// Softmax probe on the outputs of a frozen encoder, cross-entropy loss.
TrainedModel train_probe(const numcore::Network& encoder, const Matrix& x,
                         std::span<const int> labels, const TrainConfig& cfg);

/// Encoder and probe trained jointly from random initialisation.
TrainedModel train_end_to_end(const Matrix& x, std::span<const int> labels,
                              const TrainConfig& cfg);

/// Argmax class per row.
std::vector<int> predict_classes(const numcore::Network& net, const Matrix& x,
                                 Exec exec = Exec::serial);

/// Initial encoder for a given seed; SCL and end-to-end training start from it.
numcore::Network initial_encoder(std::size_t in_dim, const TrainConfig& cfg);

}  // namespace affectcl::training
