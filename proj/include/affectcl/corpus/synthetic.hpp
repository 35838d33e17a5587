#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "affectcl/corpus/types.hpp"

namespace affectcl::corpus {

struct SynthConfig {
  std::size_t n_participants = 23;
  double session_length_s = 60.0;
  std::uint64_t seed = 1;
  /// Signal-to-noise power ratio of every feature; +inf gives noiseless features, 0 pure noise.
  double snr = 0.05;
  std::array<std::size_t, 3> dims = kReferenceDims;
  std::size_t n_annotators = 6;
  double annotation_rate_hz = 25.0;
  double feature_rate_hz = 5.0;
  double annotator_noise = 0.05;
  double participant_offset = 0.3;

  void validate() const;
};

/// Sessions driven by a smooth latent arousal signal per participant. Annotators
/// see the latent plus independent noise; every feature is a fixed random linear
/// readout of the latent mixed with white noise at the configured snr plus a
/// per-participant offset. Bit-reproducible from the seed.
std::vector<Session> generate_synthetic(const SynthConfig& cfg);

}  // namespace affectcl::corpus
