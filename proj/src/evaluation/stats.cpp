#include "affectcl/evaluation/stats.hpp"

#include <cmath>
#include <limits>

#include "affectcl/errors.hpp"

namespace affectcl::evaluation {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta: continued fraction did not converge");
}

}  // namespace

double mean(std::span<const double> v) {
  if (v.empty()) throw ConfigError("mean of an empty sample");
  // shifted by the first value: a constant sample returns that constant exactly
  const double x0 = v.front();
  double s = 0.0;
  for (double x : v) s += x - x0;
  return x0 + s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw ConfigError("variance needs at least 2 values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("incomplete beta: a and b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw ConfigError("t distribution: df must be > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("t quantile: p must be in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TTestResult t_test_two_tailed(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ConfigError("t-test: each sample needs at least 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double df = na + nb - 2.0;
  const double pooled =
      ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / df;
  if (!(pooled > 0.0)) throw DegenerateInputError("t-test: pooled variance is zero");
  const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  const double t = (mean(a) - mean(b)) / se;
  const double p = regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return {t, df, std::min(1.0, p)};
}

}  // namespace affectcl::evaluation
