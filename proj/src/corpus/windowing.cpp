#include "affectcl/corpus/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "affectcl/errors.hpp"

namespace affectcl::corpus {
namespace {

// Timestamps within this distance of a window edge are treated as on the edge.
constexpr double kTimeEps = 1e-9;

std::size_t first_sample_at_or_after(double t, const AnnotationTrace& trace) {
  const double pos = std::ceil((t - trace.start_s) * trace.rate_hz - kTimeEps);
  if (pos <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(pos), trace.values.size());
}

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

}  // namespace

AnnotationTrace fuse_annotations(std::span<const AnnotationTrace> traces) {
  if (traces.empty()) throw ConfigError("fuse_annotations: no traces");
  const auto& first = traces.front();
  for (const auto& t : traces) {
    if (t.values.size() != first.values.size()) {
      throw ConfigError("fuse_annotations: ragged traces (" + t.annotator_id + " has " +
                        std::to_string(t.values.size()) + " samples, expected " +
                        std::to_string(first.values.size()) + ")");
    }
    if (t.rate_hz != first.rate_hz || t.start_s != first.start_s) {
      throw ConfigError("fuse_annotations: traces differ in rate or start time");
    }
  }
  AnnotationTrace fused{"median", std::vector<double>(first.values.size()), first.rate_hz,
                        first.start_s};
  std::vector<double> column(traces.size());
  const std::size_t mid = traces.size() / 2;
  for (std::size_t i = 0; i < first.values.size(); ++i) {
    for (std::size_t a = 0; a < traces.size(); ++a) column[a] = traces[a].values[i];
    std::sort(column.begin(), column.end());
    fused.values[i] = column.size() % 2 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
  }
  return fused;
}

std::size_t window_count(double duration_s, double length_s, double step_s) {
  if (!(length_s > 0.0) || !(step_s > 0.0)) throw ConfigError("window length and step must be > 0");
  if (length_s > duration_s + kTimeEps) return 0;
  return static_cast<std::size_t>(std::floor((duration_s - length_s) / step_s + kTimeEps)) + 1;
}

std::vector<WindowSample> window_session(const Session& session, const AnnotationTrace& fused,
                                         double length_s, double step_s,
                                         const ModalityConfig& modality,
                                         std::vector<std::string>* warnings) {
  modality.validate();
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(session.participant_id + ": " + std::move(msg));
  };

  std::vector<const FeatureStream*> streams;
  for (auto m : modality.selected) {
    const auto it = session.streams.find(m);
    if (it == session.streams.end()) {
      throw ConfigError("session " + session.participant_id + " has no " +
                        std::string(to_string(m)) + " features");
    }
    if (it->second.frames.cols() != modality.dim(m)) {
      throw ConfigError("session " + session.participant_id + ": " + std::string(to_string(m)) +
                        " has " + std::to_string(it->second.frames.cols()) + " features, expected " +
                        std::to_string(modality.dim(m)));
    }
    streams.push_back(&it->second);
  }

  const double origin = fused.start_s;
  const std::size_t n = window_count(fused.end_s() - origin, length_s, step_s);
  if (n == 0) warn("window of " + fmt_time(length_s) + " s longer than session; no windows");

  std::vector<WindowSample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ws = origin + static_cast<double>(k) * step_s;
    const double we = ws + length_s;

    const std::size_t a0 = first_sample_at_or_after(ws, fused);
    const std::size_t a1 = first_sample_at_or_after(we, fused);
    if (a1 < a0 + 2) {
      warn("window at " + fmt_time(ws) + " s has fewer than 2 annotation samples; dropped");
      continue;
    }

    WindowSample w{session.participant_id, ws, length_s, {}, {}};
    w.features.reserve(modality.fused_dim());
    bool empty = false;
    for (const auto* s : streams) {
      const auto lo = std::lower_bound(s->times.begin(), s->times.end(), ws - kTimeEps);
      const auto hi = std::lower_bound(lo, s->times.end(), we - kTimeEps);
      const auto f0 = static_cast<std::size_t>(lo - s->times.begin());
      const auto f1 = static_cast<std::size_t>(hi - s->times.begin());
      if (f1 == f0) {
        empty = true;
        break;
      }
      const std::size_t base = w.features.size();
      w.features.resize(base + s->frames.cols(), 0.0);
      for (std::size_t f = f0; f < f1; ++f) {
        const auto row = s->frames.row(f);
        for (std::size_t c = 0; c < row.size(); ++c) w.features[base + c] += row[c];
      }
      const double count = static_cast<double>(f1 - f0);
      for (std::size_t c = base; c < w.features.size(); ++c) w.features[c] /= count;
    }
    if (empty) {
      warn("window at " + fmt_time(ws) + " s has no feature frames; dropped");
      continue;
    }

    const affect::WindowTrace trace(
        std::span<const double>(fused.values).subspan(a0, a1 - a0));
    w.measures = affect::compute_measures(trace);
    out.push_back(std::move(w));
  }
  return out;
}

WindowSet WindowSet::subset(std::span<const std::size_t> indices) const {
  WindowSet out;
  out.participants = participants;
  out.length_s = length_s;
  out.features = features.gather_rows(indices);
  out.participant_of.reserve(indices.size());
  out.start_s.reserve(indices.size());
  out.measures.reserve(indices.size());
  for (auto i : indices) {
    out.participant_of.push_back(participant_of.at(i));
    out.start_s.push_back(start_s.at(i));
    out.measures.push_back(measures.at(i));
  }
  return out;
}

WindowSet build_windows(std::span<const Session> sessions, double length_s, double step_s,
                        const ModalityConfig& modality, Exec exec,
                        std::vector<std::string>* warnings) {
  modality.validate();
  std::vector<std::vector<WindowSample>> per_session(sessions.size());
  std::vector<std::vector<std::string>> per_warnings(sessions.size());
  std::vector<std::string> errors(sessions.size());

  const auto n = static_cast<std::ptrdiff_t>(sessions.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      const auto fused = fuse_annotations(sessions[u].annotations);
      per_session[u] =
          window_session(sessions[u], fused, length_s, step_s, modality, &per_warnings[u]);
    } catch (const std::exception& e) {
      errors[u] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ConfigError(e);
  }

  WindowSet set;
  set.length_s = length_s;
  for (const auto& s : sessions) set.participants.push_back(s.participant_id);
  std::sort(set.participants.begin(), set.participants.end());
  if (std::adjacent_find(set.participants.begin(), set.participants.end()) !=
      set.participants.end()) {
    throw ConfigError("build_windows: duplicate participant id");
  }

  std::size_t total = 0;
  for (const auto& v : per_session) total += v.size();
  set.features.resize(total, modality.fused_dim());
  std::size_t row = 0;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    const auto pid = static_cast<std::size_t>(
        std::lower_bound(set.participants.begin(), set.participants.end(),
                         sessions[s].participant_id) -
        set.participants.begin());
    for (auto& w : per_session[s]) {
      std::copy(w.features.begin(), w.features.end(), set.features.row(row).begin());
      set.participant_of.push_back(pid);
      set.start_s.push_back(w.start_s);
      set.measures.push_back(w.measures);
      ++row;
    }
    if (warnings) {
      warnings->insert(warnings->end(), per_warnings[s].begin(), per_warnings[s].end());
    }
  }
  return set;
}

}  // namespace affectcl::corpus
