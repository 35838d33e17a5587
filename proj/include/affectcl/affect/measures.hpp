#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace affectcl::affect {

/// Annotation samples of one time window, values in [-1, 1].
class WindowTrace {
 public:
  /// Throws ConfigError on fewer than `min_samples` values or out-of-range entries.
  explicit WindowTrace(std::span<const double> values, std::size_t min_samples = 2);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::span<const double> values_;
};

struct AffectMeasures {
  double state = 0.0;   // mean annotation value
  double change = 0.0;  // mean |consecutive difference|
  double trend = 0.0;   // mean signed consecutive difference

  friend bool operator==(const AffectMeasures&, const AffectMeasures&) = default;
};

/// Mean of the n samples.
double affect_state(const WindowTrace& trace);
/// Mean of the n-1 absolute consecutive differences.
double affect_change(const WindowTrace& trace);
/// Mean of the n-1 signed consecutive differences, i.e. (last - first)/(n-1).
double affect_trend(const WindowTrace& trace);
AffectMeasures compute_measures(const WindowTrace& trace);

enum class Strategy { high_low, change_unchanged, up_down };

std::string_view to_string(Strategy s);

/// Median (mean of the two middle values for even counts). ConfigError when empty.
double median(std::span<const double> values);

struct LabelThresholds {
  Strategy strategy = Strategy::high_low;
  double median_value = 0.0;
  double epsilon = 0.0;  // only read for high_low
};

LabelThresholds compute_threshold(std::span<const double> measures, Strategy strategy,
                                  double epsilon = 0.0);

/// The measure a strategy thresholds on.
double measure_for(const AffectMeasures& m, Strategy s);

struct ContrastiveLabel {
  Strategy strategy = Strategy::high_low;
  /// high / change / uptrend
  bool upper = false;

  int category() const noexcept { return upper ? 1 : 0; }
  std::string_view name() const noexcept;

  friend bool operator==(const ContrastiveLabel&, const ContrastiveLabel&) = default;
};

/// nullopt means the window falls in the high/low ambiguity band and is excluded.
std::optional<ContrastiveLabel> assign_label(const AffectMeasures& m, const LabelThresholds& th);

}  // namespace affectcl::affect
