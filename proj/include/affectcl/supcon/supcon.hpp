#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "affectcl/kernels.hpp"
#include "affectcl/matrix.hpp"

namespace affectcl::supcon {

/// Non-owning view of one minibatch: one representation per row, one category
/// id per row, and the softmax temperature.
struct ContrastiveBatch {
  const Matrix& representations;
  std::span<const int> labels;
  double temperature;

  /// Throws ConfigError unless rows == labels >= 2 and temperature > 0.
  void validate() const;
};

/// Unit-norm copy of `r`; DegenerateInputError for a zero vector.
std::vector<double> l2_normalize(std::span<const double> r);

struct PositiveSets {
  std::vector<std::size_t> positives;  // same label, excluding the anchor
  std::vector<std::size_t> contrast;   // every index except the anchor
};

PositiveSets positive_sets(std::span<const int> labels, std::size_t anchor);

struct SupconLoss {
  double total = 0.0;             // sum over anchors
  double mean_per_anchor = 0.0;   // total / active_anchors (0 when none); logging only
  std::size_t active_anchors = 0; // anchors with at least one positive
  std::vector<double> anchor_terms;
};

struct SupconGradient {
  SupconLoss loss;
  Matrix grad;  // dLoss/d(representations), same shape as the batch
};

/// Supervised contrastive loss on L2-normalised representations. Anchors with no
/// positive in the batch contribute nothing.
SupconLoss supcon_loss(const ContrastiveBatch& batch, Exec exec = Exec::serial);

/// Loss plus its exact gradient w.r.t. the un-normalised representations.
SupconGradient supcon_grad(const ContrastiveBatch& batch, Exec exec = Exec::serial);

}  // namespace affectcl::supcon
