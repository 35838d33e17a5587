#pragma once

#include <functional>
#include <span>
#include <vector>

namespace affectcl::numcore {

using LossFn = std::function<double(std::span<const double>)>;

/// Central differences (L(p+h) - L(p-h)) / 2h, one parameter at a time.
std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params,
                                     double h = 1e-5);

/// ||a - b|| / (||a|| + ||b||); 0 when both are below `floor`.
double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-12);

}  // namespace affectcl::numcore
