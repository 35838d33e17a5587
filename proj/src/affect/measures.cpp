#include "affectcl/affect/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affectcl/errors.hpp"

namespace affectcl::affect {

WindowTrace::WindowTrace(std::span<const double> values, std::size_t min_samples)
    : values_(values) {
  if (values.size() < min_samples) {
    throw ConfigError("window trace needs at least " + std::to_string(min_samples) +
                      " samples, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= -1.0 && values[i] <= 1.0)) {
      throw ConfigError("window trace value " + std::to_string(values[i]) + " at index " +
                        std::to_string(i) + " outside [-1, 1]");
    }
  }
}

double affect_state(const WindowTrace& trace) {
  const auto v = trace.values();
  if (v.empty()) throw ConfigError("affect_state: empty trace");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double affect_change(const WindowTrace& trace) {
  const auto v = trace.values();
  if (v.size() < 2) throw ConfigError("affect_change: need at least 2 samples");
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) s += std::abs(v[i] - v[i - 1]);
  return s / static_cast<double>(v.size() - 1);
}

double affect_trend(const WindowTrace& trace) {
  const auto v = trace.values();
  if (v.size() < 2) throw ConfigError("affect_trend: need at least 2 samples");
  double s = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) s += v[i] - v[i - 1];
  return s / static_cast<double>(v.size() - 1);
}

AffectMeasures compute_measures(const WindowTrace& trace) {
  return {affect_state(trace), affect_change(trace), affect_trend(trace)};
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::high_low: return "HL";
    case Strategy::change_unchanged: return "CU";
    case Strategy::up_down: return "UD";
  }
  return "?";
}

double median(std::span<const double> values) {
  if (values.empty()) throw ConfigError("median of an empty list");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

LabelThresholds compute_threshold(std::span<const double> measures, Strategy strategy,
                                  double epsilon) {
  if (measures.empty()) throw ConfigError("compute_threshold: empty measure list");
  if (strategy == Strategy::high_low && !(epsilon >= 0.0)) {
    throw ConfigError("compute_threshold: epsilon must be >= 0");
  }
  return {strategy, median(measures), strategy == Strategy::high_low ? epsilon : 0.0};
}

double measure_for(const AffectMeasures& m, Strategy s) {
  switch (s) {
    case Strategy::high_low: return m.state;
    case Strategy::change_unchanged: return m.change;
    case Strategy::up_down: return m.trend;
  }
  return m.state;
}

std::string_view ContrastiveLabel::name() const noexcept {
  switch (strategy) {
    case Strategy::high_low: return upper ? "high" : "low";
    case Strategy::change_unchanged: return upper ? "change" : "unchanged";
    case Strategy::up_down: return upper ? "uptrend" : "downtrend";
  }
  return "?";
}

std::optional<ContrastiveLabel> assign_label(const AffectMeasures& m, const LabelThresholds& th) {
  const double x = measure_for(m, th.strategy);
  switch (th.strategy) {
    case Strategy::high_low:
      if (x > th.median_value + th.epsilon) return ContrastiveLabel{th.strategy, true};
      if (x < th.median_value - th.epsilon) return ContrastiveLabel{th.strategy, false};
      return std::nullopt;
    case Strategy::change_unchanged:
    case Strategy::up_down:
      return ContrastiveLabel{th.strategy, x > th.median_value};
  }
  return std::nullopt;
}

}  // namespace affectcl::affect
