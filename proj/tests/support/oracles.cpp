#include "oracles.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace affectcl::testing {

long double naive_supcon(const Matrix& reps, std::span<const int> labels, double tau) {
  const std::size_t n = reps.rows();
  std::vector<std::vector<long double>> z(n, std::vector<long double>(reps.cols()));
  for (std::size_t i = 0; i < n; ++i) {
    long double sq = 0;
    for (std::size_t k = 0; k < reps.cols(); ++k) sq += (long double)reps(i, k) * reps(i, k);
    const long double norm = std::sqrt(sq);
    for (std::size_t k = 0; k < reps.cols(); ++k) z[i][k] = reps(i, k) / norm;
  }
  auto dot = [&](std::size_t a, std::size_t b) {
    long double s = 0;
    for (std::size_t k = 0; k < z[a].size(); ++k) s += z[a][k] * z[b][k];
    return s;
  };
  long double total = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> positives;
    for (std::size_t p = 0; p < n; ++p) {
      if (p != s && labels[p] == labels[s]) positives.push_back(p);
    }
    if (positives.empty()) continue;
    long double denom = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (a != s) denom += std::exp(dot(s, a) / (long double)tau);
    }
    long double inner = 0;
    for (auto p : positives) inner += std::log(std::exp(dot(s, p) / (long double)tau) / denom);
    total += -inner / (long double)positives.size();
  }
  return total;
}

double boost_two_sided_p(double t, double df) {
  boost::math::students_t_distribution<long double> dist(df);
  return static_cast<double>(2.0L * boost::math::cdf(boost::math::complement(dist, std::fabs((long double)t))));
}

double boost_t_quantile(double p, double df) {
  boost::math::students_t_distribution<long double> dist(df);
  return static_cast<double>(boost::math::quantile(dist, (long double)p));
}

double boost_ibeta(double a, double b, double x) {
  return static_cast<double>(boost::math::ibeta((long double)a, (long double)b, (long double)x));
}

double pooled_t(std::span<const double> a, std::span<const double> b) {
  auto mean = [](std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0L) / (long double)v.size();
  };
  const long double ma = mean(a), mb = mean(b);
  long double ssa = 0, ssb = 0;
  for (double x : a) ssa += (x - ma) * (x - ma);
  for (double x : b) ssb += (x - mb) * (x - mb);
  const long double na = a.size(), nb = b.size();
  const long double sp2 = (ssa + ssb) / (na + nb - 2);
  return static_cast<double>((ma - mb) / std::sqrt(sp2 * (1 / na + 1 / nb)));
}

double linear_readout_accuracy(const evaluation::LabeledCorpus& corpus, std::size_t k,
                               std::uint64_t seed) {
  const auto& w = corpus.windows;
  const auto folds = evaluation::split_folds(w.participants, k, seed);
  const Eigen::Index d = static_cast<Eigen::Index>(w.features.cols());
  double acc_sum = 0;
  for (const auto& fold : folds) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto& pid = w.participants[w.participant_of[i]];
      const bool in_test = std::find(fold.test_participants.begin(), fold.test_participants.end(),
                                     pid) != fold.test_participants.end();
      (in_test ? te : tr).push_back(i);
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d), sd = Eigen::VectorXd::Zero(d);
    for (auto i : tr) {
      for (Eigen::Index c = 0; c < d; ++c) mu[c] += w.features(i, c);
    }
    mu /= double(tr.size());
    for (auto i : tr) {
      for (Eigen::Index c = 0; c < d; ++c) sd[c] += std::pow(w.features(i, c) - mu[c], 2);
    }
    for (Eigen::Index c = 0; c < d; ++c) sd[c] = std::sqrt(sd[c] / double(tr.size())) + 1e-12;

    auto design = [&](const std::vector<std::size_t>& idx) {
      Eigen::MatrixXd a(static_cast<Eigen::Index>(idx.size()), d + 1);
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
          a(static_cast<Eigen::Index>(r), c) = (w.features(idx[r], c) - mu[c]) / sd[c];
        }
        a(static_cast<Eigen::Index>(r), d) = 1.0;
      }
      return a;
    };
    const Eigen::MatrixXd a = design(tr);
    Eigen::VectorXd target(static_cast<Eigen::Index>(tr.size()));
    for (std::size_t r = 0; r < tr.size(); ++r) target[static_cast<Eigen::Index>(r)] = corpus.hl_labels[tr[r]] ? 1.0 : -1.0;
    const Eigen::VectorXd coef = a.completeOrthogonalDecomposition().solve(target);
    const Eigen::VectorXd score = design(te) * coef;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < te.size(); ++r) {
      correct += (score[static_cast<Eigen::Index>(r)] > 0) == (corpus.hl_labels[te[r]] == 1);
    }
    acc_sum += double(correct) / double(te.size());
  }
  return acc_sum / double(folds.size());
}

double logistic_fit_accuracy(const Matrix& x, std::span<const int> labels) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.rows());
  const Eigen::Index d = static_cast<Eigen::Index>(x.cols()) + 1;
  Eigen::MatrixXd a(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c + 1 < d; ++c) a(i, c) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
    a(i, d - 1) = 1.0;
    y[i] = labels[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd p = ((-(a * w)).array().exp() + 1.0).inverse().matrix();
    const Eigen::VectorXd g = a.transpose() * (p - y) + 1e-3 * w;
    const Eigen::VectorXd s = (p.array() * (1.0 - p.array())).matrix();
    const Eigen::MatrixXd h = a.transpose() * s.asDiagonal() * a +
                              1e-3 * Eigen::MatrixXd::Identity(d, d);
    w -= h.ldlt().solve(g);
  }
  const Eigen::VectorXd score = a * w;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) correct += (score[i] > 0) == (y[i] > 0.5);
  return double(correct) / double(n);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo,
                     double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (auto& v : m.flat()) v = u(rng);
  return m;
}

Blobs make_blobs(std::size_t n, std::size_t dim, double separation, double noise,
                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  Blobs b{Matrix(n, dim), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    b.y[i] = label;
    for (std::size_t c = 0; c < dim; ++c) b.x(i, c) = g(rng);
    b.x(i, 0) += label ? separation / 2 : -separation / 2;
  }
  return b;
}

}  // namespace affectcl::testing
