#pragma once

#include <span>
#include <string>
#include <vector>

#include "affectcl/affect/measures.hpp"
#include "affectcl/corpus/types.hpp"
#include "affectcl/kernels.hpp"

namespace affectcl::corpus {

/// Pointwise median across annotators (mean of the middle pair for even counts).
AnnotationTrace fuse_annotations(std::span<const AnnotationTrace> traces);

struct WindowSample {
  std::string participant_id;
  double start_s = 0.0;
  double length_s = 0.0;
  std::vector<double> features;  // per-feature mean over the window's frames
  affect::AffectMeasures measures;
};

/// Number of window starts 0, step, 2*step, ... whose window fits in `duration_s`.
std::size_t window_count(double duration_s, double length_s, double step_s);

/// Frames and annotation samples belong to a window when their time lies in
/// [start, start + length). Windows with no frame in some selected modality or
/// fewer than two annotation samples are dropped and reported in `warnings`.
std::vector<WindowSample> window_session(const Session& session, const AnnotationTrace& fused,
                                         double length_s, double step_s,
                                         const ModalityConfig& modality,
                                         std::vector<std::string>* warnings = nullptr);

/// All windows of a corpus in matrix form.
struct WindowSet {
  std::vector<std::string> participants;    // distinct ids, sorted
  std::vector<std::size_t> participant_of;  // index into participants, per window
  std::vector<double> start_s;
  double length_s = 0.0;
  Matrix features;
  std::vector<affect::AffectMeasures> measures;

  std::size_t size() const noexcept { return participant_of.size(); }
  WindowSet subset(std::span<const std::size_t> indices) const;
};

/// Fuses each session's annotators and windows it. Sessions are processed in
/// parallel under Exec::parallel; output order is always session order.
WindowSet build_windows(std::span<const Session> sessions, double length_s, double step_s,
                        const ModalityConfig& modality, Exec exec = Exec::serial,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace affectcl::corpus
