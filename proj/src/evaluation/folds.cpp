#include <algorithm>
#include <random>
#include <set>

#include "affectcl/errors.hpp"
#include "affectcl/evaluation/experiment.hpp"

namespace affectcl::evaluation {

std::vector<FoldSplit> split_folds(std::vector<std::string> participants, std::size_t k,
                                   std::uint64_t seed) {
  if (k < 2) throw ConfigError("split_folds: k must be >= 2");
  std::sort(participants.begin(), participants.end());
  if (std::adjacent_find(participants.begin(), participants.end()) != participants.end()) {
    throw ConfigError("split_folds: duplicate participant");
  }
  if (participants.size() < k) {
    throw ConfigError("split_folds: " + std::to_string(k) + " folds but only " +
                      std::to_string(participants.size()) + " participants");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(participants.begin(), participants.end(), rng);

  const std::size_t n = participants.size();
  std::vector<FoldSplit> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].fold_index = f;
    folds[f].test_participants.assign(participants.begin() + static_cast<std::ptrdiff_t>(pos),
                                      participants.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  for (auto& fold : folds) {
    std::sort(fold.test_participants.begin(), fold.test_participants.end());
    for (const auto& p : participants) {
      if (!std::binary_search(fold.test_participants.begin(), fold.test_participants.end(), p)) {
        fold.train_participants.push_back(p);
      }
    }
    std::sort(fold.train_participants.begin(), fold.train_participants.end());
  }
  return folds;
}

std::uint64_t fold_seed(std::uint64_t run_seed, std::size_t fold) {
  // splitmix64 finaliser over (run seed, fold)
  std::uint64_t z = run_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(fold) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (truth.empty()) throw ConfigError("accuracy: empty test set");
  if (predicted.size() != truth.size()) throw ConfigError("accuracy: length mismatch");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

double evaluate_accuracy(const numcore::Network& model, const Matrix& x,
                         std::span<const int> labels, Exec exec) {
  if (labels.empty()) throw ConfigError("evaluate_accuracy: empty test set");
  return accuracy(training::predict_classes(model, x, exec), labels);
}

int majority_class(std::span<const int> labels) {
  if (labels.empty()) throw ConfigError("majority_class: no labels");
  const auto ones = std::count(labels.begin(), labels.end(), 1);
  return 2 * static_cast<std::size_t>(ones) > labels.size() ? 1 : 0;
}

}  // namespace affectcl::evaluation
