#pragma once

#include <vector>

#include "affectcl/matrix.hpp"

namespace affectcl::corpus {

/// Per-column z-scoring with statistics frozen at fit time.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // population std; 0 marks a constant column

  static Standardizer fit(const Matrix& train);
  Matrix apply(const Matrix& x) const;
};

struct Standardized {
  Matrix features;
  Standardizer stats;
};

/// Fits on `train` and transforms `apply`. Constant training columns map to 0.
Standardized standardize_features(const Matrix& train, const Matrix& apply);

}  // namespace affectcl::corpus
