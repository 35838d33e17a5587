#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "affectcl/matrix.hpp"

namespace affectcl::corpus {

enum class Modality { audio = 0, video = 1, physiology = 2 };

inline constexpr std::array<Modality, 3> kAllModalities{Modality::audio, Modality::video,
                                                         Modality::physiology};
/// Handcrafted feature counts of the reference corpus.
inline constexpr std::array<std::size_t, 3> kReferenceDims{130, 40, 116};

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view name);

struct ModalityConfig {
  std::vector<Modality> selected;  // kept in audio, video, physiology order
  std::array<std::size_t, 3> dims = kReferenceDims;

  std::size_t dim(Modality m) const { return dims[static_cast<std::size_t>(m)]; }
  std::size_t fused_dim() const;
  bool contains(Modality m) const;
  /// "audio", "audio+video", "all", ...
  std::string name() const;
  void validate() const;

  /// Accepts "all" or '+'-joined modality names.
  static ModalityConfig parse(std::string_view text,
                              std::array<std::size_t, 3> dims = kReferenceDims);
};

/// The five configurations of the reference experiment grid.
std::vector<ModalityConfig> default_modality_grid(std::array<std::size_t, 3> dims = kReferenceDims);

struct FeatureStream {
  std::vector<double> times;  // strictly increasing
  Matrix frames;              // one row per timestamp
};

struct AnnotationTrace {
  std::string annotator_id;
  std::vector<double> values;  // in [-1, 1]
  double rate_hz = 25.0;
  double start_s = 0.0;

  double time_of(std::size_t i) const { return start_s + static_cast<double>(i) / rate_hz; }
  /// End of the half-open span covered by the samples.
  double end_s() const { return start_s + static_cast<double>(values.size()) / rate_hz; }
};

struct Session {
  std::string participant_id;
  std::map<Modality, FeatureStream> streams;
  std::vector<AnnotationTrace> annotations;

  /// Throws ConfigError naming the first broken invariant.
  void validate() const;
};

}  // namespace affectcl::corpus
