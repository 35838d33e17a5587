#include "affectcl/numcore/finite_diff.hpp"

#include <cmath>
#include <vector>

#include "affectcl/errors.hpp"

namespace affectcl::numcore {

std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff_grad: h must be > 0");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double up = loss(p);
    p[i] = saved - h;
    const double down = loss(p);
    p[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw ConfigError("relative_error: length mismatch");
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nb);
  if (denom < floor) return 0.0;
  return std::sqrt(diff) / denom;
}

}  // namespace affectcl::numcore
