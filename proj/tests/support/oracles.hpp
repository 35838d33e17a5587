#pragma once

// Independent reference computations used only by tests. None of these share a
// code path with the library routines they check.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "affectcl/evaluation/experiment.hpp"
#include "affectcl/matrix.hpp"

namespace affectcl::testing {

/// Term-by-term transcription of the supervised contrastive loss in long double,
/// without log-sum-exp stabilisation.
long double naive_supcon(const Matrix& reps, std::span<const int> labels, double tau);

/// Two-sided p of a t statistic from Boost.Math.
double boost_two_sided_p(double t, double df);
double boost_t_quantile(double p, double df);
double boost_ibeta(double a, double b, double x);

/// Pooled two-sample t statistic written out by hand.
double pooled_t(std::span<const double> a, std::span<const double> b);

/// Least-squares linear readout (targets +-1) on train-standardised features,
/// evaluated on participant-disjoint folds; mean held-out accuracy.
double linear_readout_accuracy(const evaluation::LabeledCorpus& corpus, std::size_t k,
                               std::uint64_t seed);

/// Training accuracy of an L2-regularised logistic regression fitted by Newton's method.
double logistic_fit_accuracy(const Matrix& x, std::span<const int> labels);

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0);

/// Two Gaussian blobs in `dim` dimensions separated along the first axis.
struct Blobs {
  Matrix x;
  std::vector<int> y;
};
Blobs make_blobs(std::size_t n, std::size_t dim, double separation, double noise,
                 std::uint64_t seed);

}  // namespace affectcl::testing
