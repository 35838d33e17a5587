#include "affectcl/corpus/standardize.hpp"

#include <cmath>

#include "affectcl/errors.hpp"

namespace affectcl::corpus {
namespace {
constexpr double kConstantColumn = 1e-12;
}

Standardizer Standardizer::fit(const Matrix& train) {
  if (train.rows() == 0) throw ConfigError("standardize: empty training set");
  const std::size_t d = train.cols();
  const double n = static_cast<double>(train.rows());
  Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  }
  for (auto& m : s.mean) m /= n;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = row[c] - s.mean[c];
      s.stddev[c] += dev * dev;
    }
  }
  for (auto& v : s.stddev) {
    v = std::sqrt(v / n);
    if (v < kConstantColumn) v = 0.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw ConfigError("standardize: column count mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto in = x.row(r);
    auto o = out.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = stddev[c] == 0.0 ? 0.0 : (in[c] - mean[c]) / stddev[c];
    }
  }
  return out;
}

Standardized standardize_features(const Matrix& train, const Matrix& apply) {
  auto stats = Standardizer::fit(train);
  auto features = stats.apply(apply);
  return {std::move(features), std::move(stats)};
}

}  // namespace affectcl::corpus
