#include "affectcl/corpus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "affectcl/errors.hpp"

namespace affectcl::corpus {
namespace {

constexpr std::array<double, 3> kAmplitudes{0.55, 0.3, 0.15};
// Latent std is roughly 0.45; features see latent / kLatentScale.
constexpr double kLatentScale = 0.45;

std::string numbered(char prefix, std::size_t i, std::size_t width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, static_cast<int>(width), i);
  return buf;
}

// Distinct, well-separated streams for the global embedding and each participant.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void SynthConfig::validate() const {
  if (n_participants < 2) throw ConfigError("synthetic corpus needs at least 2 participants");
  if (!(session_length_s > 0.0)) throw ConfigError("session length must be > 0");
  if (!(snr >= 0.0)) throw ConfigError("snr must be >= 0");
  if (n_annotators == 0) throw ConfigError("need at least one annotator");
  if (!(annotation_rate_hz > 0.0) || !(feature_rate_hz > 0.0)) {
    throw ConfigError("sample rates must be > 0");
  }
  if (!(annotator_noise >= 0.0) || !(participant_offset >= 0.0)) {
    throw ConfigError("noise levels must be >= 0");
  }
  for (auto d : dims) {
    if (d == 0) throw ConfigError("every modality needs at least one feature");
  }
}

std::vector<Session> generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();

  const double signal_w = std::isinf(cfg.snr) ? 1.0 : std::sqrt(cfg.snr / (1.0 + cfg.snr));
  const double noise_w = std::isinf(cfg.snr) ? 0.0 : std::sqrt(1.0 / (1.0 + cfg.snr));

  // Shared across participants: latent frequencies and the feature embedding.
  auto global = stream_rng(cfg.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, 3> freqs{};
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    // roughly 0.008-0.015, 0.02-0.04, 0.05-0.1 Hz
    const double lo = 0.008 * std::pow(2.6, static_cast<double>(k));
    freqs[k] = lo * (1.0 + unit(global));
  }
  std::array<std::vector<double>, 3> embedding;
  for (auto m : kAllModalities) {
    auto& e = embedding[static_cast<std::size_t>(m)];
    e.resize(cfg.dims[static_cast<std::size_t>(m)]);
    for (auto& v : e) v = normal(global);
  }

  const std::size_t n_ann = static_cast<std::size_t>(
      std::llround(cfg.session_length_s * cfg.annotation_rate_hz));
  const std::size_t n_frames =
      static_cast<std::size_t>(std::llround(cfg.session_length_s * cfg.feature_rate_hz));
  const std::size_t width = std::max<std::size_t>(2, std::to_string(cfg.n_participants).size());

  std::vector<Session> sessions;
  sessions.reserve(cfg.n_participants);
  for (std::size_t p = 0; p < cfg.n_participants; ++p) {
    auto rng = stream_rng(cfg.seed, p + 1);
    std::array<double, 3> phases{};
    for (auto& ph : phases) ph = 2.0 * std::numbers::pi * unit(rng);
    const double baseline = 0.4 * (unit(rng) - 0.5);
    auto latent = [&](double t) {
      double v = baseline;
      for (std::size_t k = 0; k < kAmplitudes.size(); ++k) {
        v += kAmplitudes[k] * std::sin(2.0 * std::numbers::pi * freqs[k] * t + phases[k]);
      }
      return std::clamp(v, -1.0, 1.0);
    };

    Session s;
    s.participant_id = numbered('P', p + 1, width);

    for (std::size_t a = 0; a < cfg.n_annotators; ++a) {
      AnnotationTrace trace{numbered('A', a + 1, 1), std::vector<double>(n_ann),
                            cfg.annotation_rate_hz, 0.0};
      for (std::size_t i = 0; i < n_ann; ++i) {
        const double v = latent(trace.time_of(i)) + cfg.annotator_noise * normal(rng);
        trace.values[i] = std::clamp(v, -1.0, 1.0);
      }
      s.annotations.push_back(std::move(trace));
    }

    for (auto m : kAllModalities) {
      const auto& e = embedding[static_cast<std::size_t>(m)];
      std::vector<double> offsets(e.size());
      for (auto& o : offsets) o = cfg.participant_offset * normal(rng);
      FeatureStream stream;
      stream.times.resize(n_frames);
      stream.frames.resize(n_frames, e.size());
      for (std::size_t f = 0; f < n_frames; ++f) {
        const double t = static_cast<double>(f) / cfg.feature_rate_hz;
        stream.times[f] = t;
        const double z = latent(t) / kLatentScale;
        auto row = stream.frames.row(f);
        for (std::size_t j = 0; j < e.size(); ++j) {
          row[j] = signal_w * e[j] * z + noise_w * normal(rng) + offsets[j];
        }
      }
      s.streams.emplace(m, std::move(stream));
    }
    sessions.push_back(std::move(s));
  }
  return sessions;
}

}  // namespace affectcl::corpus
