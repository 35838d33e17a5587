#include "affectcl/corpus/types.hpp"

#include <algorithm>
#include <cmath>

#include "affectcl/errors.hpp"

namespace affectcl::corpus {

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::audio: return "audio";
    case Modality::video: return "video";
    case Modality::physiology: return "physiology";
  }
  return "?";
}

Modality parse_modality(std::string_view name) {
  for (auto m : kAllModalities) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown modality '" + std::string(name) + "'");
}

std::size_t ModalityConfig::fused_dim() const {
  std::size_t d = 0;
  for (auto m : selected) d += dim(m);
  return d;
}

bool ModalityConfig::contains(Modality m) const {
  return std::find(selected.begin(), selected.end(), m) != selected.end();
}

std::string ModalityConfig::name() const {
  if (selected.size() == kAllModalities.size()) return "all";
  std::string out;
  for (auto m : selected) {
    if (!out.empty()) out += '+';
    out += to_string(m);
  }
  return out;
}

void ModalityConfig::validate() const {
  if (selected.empty()) throw ConfigError("modality selection is empty");
  for (std::size_t i = 1; i < selected.size(); ++i) {
    if (static_cast<int>(selected[i]) <= static_cast<int>(selected[i - 1])) {
      throw ConfigError("modality selection must be unique and in canonical order");
    }
  }
  for (auto m : selected) {
    if (dim(m) == 0) throw ConfigError("modality " + std::string(to_string(m)) + " has zero dims");
  }
}

ModalityConfig ModalityConfig::parse(std::string_view text, std::array<std::size_t, 3> dims) {
  ModalityConfig cfg;
  cfg.dims = dims;
  if (text == "all") {
    cfg.selected.assign(kAllModalities.begin(), kAllModalities.end());
    return cfg;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('+', pos);
    const auto part = text.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                                       : next - pos);
    const auto m = parse_modality(part);
    if (cfg.contains(m)) throw ConfigError("modality listed twice in '" + std::string(text) + "'");
    cfg.selected.push_back(m);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  std::sort(cfg.selected.begin(), cfg.selected.end());
  cfg.validate();
  return cfg;
}

std::vector<ModalityConfig> default_modality_grid(std::array<std::size_t, 3> dims) {
  std::vector<ModalityConfig> grid;
  for (const char* name : {"audio", "video", "physiology", "audio+video", "all"}) {
    grid.push_back(ModalityConfig::parse(name, dims));
  }
  return grid;
}

void Session::validate() const {
  const std::string who = "session " + participant_id + ": ";
  if (participant_id.empty()) throw ConfigError("session without participant id");
  for (const auto& [m, s] : streams) {
    if (s.times.size() != s.frames.rows()) {
      throw ConfigError(who + std::string(to_string(m)) + " timestamps and frames differ in count");
    }
    for (std::size_t i = 1; i < s.times.size(); ++i) {
      if (!(s.times[i] > s.times[i - 1])) {
        throw ConfigError(who + std::string(to_string(m)) + " timestamps not strictly increasing");
      }
    }
  }
  if (annotations.empty()) throw ConfigError(who + "no annotation traces");
  const auto& first = annotations.front();
  for (const auto& a : annotations) {
    if (!(a.rate_hz > 0.0)) throw ConfigError(who + "annotation rate must be > 0");
    if (a.values.size() != first.values.size() || a.rate_hz != first.rate_hz) {
      throw ConfigError(who + "annotator traces differ in length or rate");
    }
    for (double v : a.values) {
      if (!(v >= -1.0 && v <= 1.0)) {
        throw ConfigError(who + "annotation value outside [-1, 1] from " + a.annotator_id);
      }
    }
  }
}

}  // namespace affectcl::corpus
