#pragma once

#include <span>

namespace affectcl::evaluation {

double mean(std::span<const double> v);
/// Unbiased (n-1) variance.
double sample_variance(std::span<const double> v);

/// I_x(a, b) by Lentz's continued fraction; absolute accuracy around 1e-14.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);
/// Inverse of student_t_cdf for p in (0, 1).
double student_t_quantile(double p, double df);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Independent two-sample Student's t-test with pooled variance, two-sided p.
/// DegenerateInputError when the pooled variance is zero.
TTestResult t_test_two_tailed(std::span<const double> a, std::span<const double> b);

}  // namespace affectcl::evaluation
