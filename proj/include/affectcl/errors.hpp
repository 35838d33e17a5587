#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace affectcl {

/// Invalid shapes, hyperparameters or call preconditions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that is well-formed but mathematically degenerate (zero norm, zero variance).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite values produced during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal contract, e.g. backward() with a cache from older parameters.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Corpus ingestion failure; carries every problem found, one entry per file/row.
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "corpus load failed";
    for (const auto& s : issues) {
      out += "\n  ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace affectcl
