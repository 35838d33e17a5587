#include "affectcl/supcon/supcon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affectcl/errors.hpp"

namespace affectcl::supcon {
namespace {

struct Normalized {
  Matrix unit;
  std::vector<double> norms;
};

Normalized normalize_rows(const Matrix& reps) {
  Normalized n{Matrix(reps.rows(), reps.cols()), std::vector<double>(reps.rows())};
  for (std::size_t i = 0; i < reps.rows(); ++i) {
    const auto r = reps.row(i);
    double sq = 0.0;
    for (double v : r) sq += v * v;
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DegenerateInputError("supcon: representation " + std::to_string(i) +
                                 " has zero or non-finite norm");
    }
    n.norms[i] = norm;
    auto u = n.unit.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) u[k] = r[k] / norm;
  }
  return n;
}

// Loss term of one anchor; optionally fills dTerm/dsim for that anchor's row.
double anchor_term(const Matrix& sim, std::span<const int> labels, double tau, std::size_t i,
                   std::span<double> coeff_row) {
  const std::size_t n = labels.size();
  std::size_t n_pos = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i && labels[j] == labels[i]) ++n_pos;
  }
  if (!coeff_row.empty()) std::fill(coeff_row.begin(), coeff_row.end(), 0.0);
  if (n_pos == 0) return 0.0;

  double mx = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) mx = std::max(mx, sim(i, j) / tau);
  }
  double denom = 0.0;
  double pos_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double s = sim(i, j) / tau;
    denom += std::exp(s - mx);
    if (labels[j] == labels[i]) pos_sum += s;
  }
  const double lse = mx + std::log(denom);
  const double inv_pos = 1.0 / static_cast<double>(n_pos);

  if (!coeff_row.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double c = std::exp(sim(i, j) / tau - lse);
      if (labels[j] == labels[i]) c -= inv_pos;
      coeff_row[j] = c;
    }
  }
  return lse - pos_sum * inv_pos;
}

SupconLoss collect(std::vector<double> terms, std::span<const int> labels) {
  SupconLoss out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out.total += terms[i];
    const auto same = std::count(labels.begin(), labels.end(), labels[i]);
    if (same > 1) ++out.active_anchors;
  }
  out.mean_per_anchor =
      out.active_anchors ? out.total / static_cast<double>(out.active_anchors) : 0.0;
  out.anchor_terms = std::move(terms);
  return out;
}

}  // namespace

void ContrastiveBatch::validate() const {
  if (representations.rows() != labels.size()) {
    throw ConfigError("supcon: " + std::to_string(representations.rows()) +
                      " representations but " + std::to_string(labels.size()) + " labels");
  }
  if (labels.size() < 2) throw ConfigError("supcon: batch needs at least 2 samples");
  if (representations.cols() == 0) throw ConfigError("supcon: zero-width representations");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("supcon: temperature must be finite and > 0");
  }
}

std::vector<double> l2_normalize(std::span<const double> r) {
  double sq = 0.0;
  for (double v : r) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0)) throw DegenerateInputError("l2_normalize: zero vector");
  std::vector<double> out(r.begin(), r.end());
  for (auto& v : out) v /= norm;
  return out;
}

PositiveSets positive_sets(std::span<const int> labels, std::size_t anchor) {
  if (anchor >= labels.size()) throw ConfigError("positive_sets: anchor out of range");
  PositiveSets sets;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j == anchor) continue;
    sets.contrast.push_back(j);
    if (labels[j] == labels[anchor]) sets.positives.push_back(j);
  }
  return sets;
}

SupconLoss supcon_loss(const ContrastiveBatch& batch, Exec exec) {
  batch.validate();
  const auto normed = normalize_rows(batch.representations);
  Matrix sim;
  kernels::gram(exec, normed.unit, sim);
  const auto n = static_cast<std::ptrdiff_t>(batch.labels.size());
  std::vector<double> terms(batch.labels.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    terms[static_cast<std::size_t>(i)] =
        anchor_term(sim, batch.labels, batch.temperature, static_cast<std::size_t>(i), {});
  }
  return collect(std::move(terms), batch.labels);
}

SupconGradient supcon_grad(const ContrastiveBatch& batch, Exec exec) {
  batch.validate();
  const auto normed = normalize_rows(batch.representations);
  const std::size_t n = batch.labels.size();
  const double tau = batch.temperature;
  Matrix sim;
  kernels::gram(exec, normed.unit, sim);

  Matrix coeff(n, n);
  std::vector<double> terms(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const auto u = static_cast<std::size_t>(i);
    terms[u] = anchor_term(sim, batch.labels, tau, u, coeff.row(u));
  }

  // sim(i,j) = z_i·z_j appears in anchor i's and anchor j's terms
  Matrix sym(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = (coeff(i, j) + coeff(j, i)) / tau;
  }
  Matrix dz;
  kernels::matmul(exec, sym, normed.unit, dz);

  // back through z = r / ||r||
  SupconGradient out{collect(std::move(terms), batch.labels), Matrix(n, normed.unit.cols())};
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = normed.unit.row(i);
    const auto g = dz.row(i);
    double proj = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) proj += z[k] * g[k];
    auto dr = out.grad.row(i);
    for (std::size_t k = 0; k < z.size(); ++k) dr[k] = (g[k] - z[k] * proj) / normed.norms[i];
  }
  return out;
}

}  // namespace affectcl::supcon
