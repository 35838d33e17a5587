#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "affectcl/corpus/synthetic.hpp"
#include "affectcl/evaluation/experiment.hpp"
#include "affectcl/training/trainers.hpp"

namespace affectcl::cli {

struct SynthSpec {
  std::filesystem::path output;
  corpus::SynthConfig synth;
  std::string dimension = "arousal";
};

/// Generates a synthetic corpus and writes it in the loader's layout.
void cmd_synth(const SynthSpec& spec);

struct ExperimentSpec {
  std::filesystem::path corpus_root;
  std::vector<evaluation::Method> methods{std::begin(evaluation::kModelMethods),
                                          std::end(evaluation::kModelMethods)};
  std::vector<double> window_lengths_s{1.0, 2.0, 3.0, 4.0};
  double step_s = 0.4;
  std::vector<std::string> modalities{"audio", "video", "physiology", "audio+video", "all"};
  std::size_t n_runs = 10;
  std::size_t k_folds = 5;
  double epsilon = 0.1;
  training::TrainConfig train;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir;
  std::string dimension = "arousal";
  /// Control experiment: affect measures permuted across windows before labelling.
  bool shuffle_labels = false;
  std::size_t jobs = 1;

  void validate() const;
  nlohmann::json to_json() const;
};

struct RunOutcome {
  std::size_t cells = 0;
  std::size_t failed = 0;
  std::vector<std::string> errors;
};

/// Runs every (window, modality, method) cell; one JSON file per cell under
/// `<output>/cells/`, plus summary.csv and summary.json. A failing cell is
/// recorded and the remaining cells still run.
RunOutcome cmd_run(const ExperimentSpec& spec);

struct CompareSpec {
  std::filesystem::path results_a;
  std::filesystem::path results_b;
  /// When set, cells are matched by (window, modality) between the two methods.
  std::optional<std::string> method_a;
  std::optional<std::string> method_b;
  std::optional<std::filesystem::path> output;
  double alpha = 0.05;
};

struct CompareRow {
  std::string key;
  std::string method_a;
  std::string method_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::optional<double> t;
  std::optional<double> p;
  bool significant = false;
  bool degenerate = false;  // zero pooled variance or fewer than 2 runs
};

/// Two-tailed Student's t-test on the run-level mean accuracies of matching cells.
std::vector<CompareRow> cmd_compare(const CompareSpec& spec);

std::string render_compare(const std::vector<CompareRow>& rows, double alpha);

/// Loads every cell of a results directory (via summary.json) or a single cell file.
std::vector<evaluation::ExperimentResult> load_results(const std::filesystem::path& path);

}  // namespace affectcl::cli
