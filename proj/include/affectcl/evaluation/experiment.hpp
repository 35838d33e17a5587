#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affectcl/corpus/windowing.hpp"
#include "affectcl/numcore/network.hpp"
#include "affectcl/training/trainers.hpp"

namespace affectcl::evaluation {

// ---- folds -----------------------------------------------------------------

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::string> train_participants;  // sorted
  std::vector<std::string> test_participants;   // sorted
};

/// Seeded shuffle then a near-equal partition; the first n % k folds get one
/// extra test participant.
std::vector<FoldSplit> split_folds(std::vector<std::string> participants, std::size_t k,
                                   std::uint64_t seed);

/// Seed for one fold of one run (independent of execution order).
std::uint64_t fold_seed(std::uint64_t run_seed, std::size_t fold);

// ---- metrics ---------------------------------------------------------------

double accuracy(std::span<const int> predicted, std::span<const int> truth);
double evaluate_accuracy(const numcore::Network& model, const Matrix& x,
                         std::span<const int> labels, Exec exec = Exec::serial);
/// Most frequent class; ties go to class 0.
int majority_class(std::span<const int> labels);

// ---- experiment --------------------------------------------------------------

enum class Method { e_hl, e_cu, e_ud, e_b, majority };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
inline constexpr Method kModelMethods[] = {Method::e_hl, Method::e_cu, Method::e_ud, Method::e_b};

/// Windows that survive the high/low ambiguity band, with their downstream labels.
struct LabeledCorpus {
  corpus::WindowSet windows;
  std::vector<int> hl_labels;  // 1 = high
  double hl_median = 0.0;      // over every window of the corpus
  double epsilon = 0.1;
  std::size_t excluded = 0;
};

LabeledCorpus label_corpus(const corpus::WindowSet& all, double epsilon);

/// Control corpus: affect measures permuted across windows, breaking any link to features.
corpus::WindowSet permute_measures(corpus::WindowSet windows, std::uint64_t seed);

struct ExperimentSettings {
  std::size_t n_runs = 10;
  std::size_t k_folds = 5;
  std::uint64_t base_seed = 0;
  training::TrainConfig train;
  std::string modality;  // label only
};

struct FoldRecord {
  std::size_t run = 0;
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> train_participants;
  std::vector<std::string> test_participants;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double accuracy = 0.0;
  double majority_accuracy = 0.0;
  std::optional<double> contrastive_threshold;  // CU / UD median over training windows
  std::optional<bool> encoder_frozen;           // SCL methods: encoder unchanged by probe training
  std::size_t encoder_epochs = 0;
  std::size_t head_epochs = 0;
};

struct ExperimentResult {
  Method method = Method::e_hl;
  double window_length_s = 0.0;
  std::string modality;
  std::size_t k_folds = 0;
  std::size_t n_runs = 0;
  std::vector<std::uint64_t> run_seeds;  // base_seed + run
  double hl_median = 0.0;
  double epsilon = 0.0;
  std::vector<FoldRecord> folds;  // run-major, fold-minor

  std::vector<double> accuracies() const;
  std::vector<double> run_means() const;
};

ExperimentResult run_experiment(const LabeledCorpus& corpus, Method method,
                                const ExperimentSettings& settings);

struct Summary {
  double mean_accuracy = 0.0;
  double ci95_half_width = 0.0;  // t-interval over run-level means; 0 with a single run
  double best_fold_accuracy = 0.0;
  double majority_accuracy = 0.0;
  std::size_t n_values = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

/// Order-invariant: values are sorted before every reduction.
Summary aggregate(const ExperimentResult& result);

}  // namespace affectcl::evaluation
