#include "affectcl/evaluation/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "affectcl/affect/measures.hpp"
#include "affectcl/corpus/standardize.hpp"
#include "affectcl/errors.hpp"
#include "affectcl/evaluation/stats.hpp"
#include "affectcl/log.hpp"

namespace affectcl::evaluation {
namespace {

using affect::Strategy;

double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return mean(v);
}

std::vector<std::size_t> members(const corpus::WindowSet& w,
                                 const std::vector<std::string>& participants) {
  std::vector<char> wanted(w.participants.size(), 0);
  for (const auto& p : participants) {
    const auto it = std::lower_bound(w.participants.begin(), w.participants.end(), p);
    if (it == w.participants.end() || *it != p) {
      throw InternalError("fold refers to unknown participant " + p);
    }
    wanted[static_cast<std::size_t>(it - w.participants.begin())] = 1;
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (wanted[w.participant_of[i]]) idx.push_back(i);
  }
  return idx;
}

void assert_disjoint(const FoldSplit& fold) {
  std::vector<std::string> common;
  std::set_intersection(fold.train_participants.begin(), fold.train_participants.end(),
                        fold.test_participants.begin(), fold.test_participants.end(),
                        std::back_inserter(common));
  if (!common.empty()) {
    throw InternalError("fold " + std::to_string(fold.fold_index) + ": participant " +
                        common.front() + " in both train and test");
  }
}

std::vector<int> pick(std::span<const int> labels, std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
  return out;
}

Strategy contrastive_strategy(Method m) {
  switch (m) {
    case Method::e_cu: return Strategy::change_unchanged;
    case Method::e_ud: return Strategy::up_down;
    default: return Strategy::high_low;
  }
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::e_hl: return "E_HL";
    case Method::e_cu: return "E_CU";
    case Method::e_ud: return "E_UD";
    case Method::e_b: return "E_b";
    case Method::majority: return "majority";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::e_hl, Method::e_cu, Method::e_ud, Method::e_b, Method::majority}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "' (expected E_HL, E_CU, E_UD, E_b, majority)");
}

LabeledCorpus label_corpus(const corpus::WindowSet& all, double epsilon) {
  if (all.size() == 0) throw ConfigError("label_corpus: no windows");
  std::vector<double> states(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) states[i] = all.measures[i].state;
  const auto th = affect::compute_threshold(states, Strategy::high_low, epsilon);

  LabeledCorpus out;
  out.hl_median = th.median_value;
  out.epsilon = epsilon;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (const auto label = affect::assign_label(all.measures[i], th)) {
      keep.push_back(i);
      out.hl_labels.push_back(label->category());
    }
  }
  out.excluded = all.size() - keep.size();
  out.windows = all.subset(keep);
  return out;
}

corpus::WindowSet permute_measures(corpus::WindowSet windows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(windows.measures.begin(), windows.measures.end(), rng);
  return windows;
}

std::vector<double> ExperimentResult::accuracies() const {
  std::vector<double> v;
  for (const auto& f : folds) v.push_back(f.accuracy);
  return v;
}

std::vector<double> ExperimentResult::run_means() const {
  std::vector<double> means;
  for (std::size_t r = 0; r < n_runs; ++r) {
    std::vector<double> v;
    for (const auto& f : folds) {
      if (f.run == r) v.push_back(f.accuracy);
    }
    if (!v.empty()) means.push_back(sorted_mean(std::move(v)));
  }
  return means;
}

ExperimentResult run_experiment(const LabeledCorpus& corpus, Method method,
                                const ExperimentSettings& settings) {
  if (settings.n_runs == 0) throw ConfigError("run_experiment: n_runs must be > 0");
  settings.train.validate();
  const auto& windows = corpus.windows;
  if (windows.size() == 0) throw ConfigError("run_experiment: empty corpus");

  ExperimentResult result;
  result.method = method;
  result.window_length_s = windows.length_s;
  result.modality = settings.modality;
  result.k_folds = settings.k_folds;
  result.n_runs = settings.n_runs;
  result.hl_median = corpus.hl_median;
  result.epsilon = corpus.epsilon;

  for (std::size_t run = 0; run < settings.n_runs; ++run) {
    const std::uint64_t run_seed = settings.base_seed + run;
    result.run_seeds.push_back(run_seed);
    const auto folds = split_folds(windows.participants, settings.k_folds, run_seed);

    for (const auto& fold : folds) {
      assert_disjoint(fold);
      const std::string where = std::string(to_string(method)) + " run " + std::to_string(run) +
                                " fold " + std::to_string(fold.fold_index) + ": ";
      FoldRecord rec;
      rec.run = run;
      rec.fold = fold.fold_index;
      rec.seed = fold_seed(run_seed, fold.fold_index);
      rec.train_participants = fold.train_participants;
      rec.test_participants = fold.test_participants;

      const auto train_idx = members(windows, fold.train_participants);
      const auto test_idx = members(windows, fold.test_participants);
      rec.n_train = train_idx.size();
      rec.n_test = test_idx.size();
      if (train_idx.empty() || test_idx.empty()) {
        throw TrainingError(where + "empty train or test split");
      }

      const auto train_y = pick(corpus.hl_labels, train_idx);
      const auto test_y = pick(corpus.hl_labels, test_idx);
      const int majority = majority_class(train_y);
      rec.majority_accuracy =
          accuracy(std::vector<int>(test_y.size(), majority), test_y);

      try {
        if (method == Method::majority) {
          rec.accuracy = rec.majority_accuracy;
        } else {
          const auto scaled = corpus::standardize_features(
              windows.features.gather_rows(train_idx), windows.features.gather_rows(train_idx));
          const Matrix& train_x = scaled.features;
          const Matrix test_x = scaled.stats.apply(windows.features.gather_rows(test_idx));

          auto cfg = settings.train;
          cfg.seed = rec.seed;
          numcore::Network model;

          if (method == Method::e_b) {
            auto trained = training::train_end_to_end(train_x, train_y, cfg);
            rec.head_epochs = trained.report.epoch_loss.size();
            model = std::move(trained.net);
          } else {
            std::vector<int> contrastive = train_y;
            const auto strategy = contrastive_strategy(method);
            if (strategy != Strategy::high_low) {
              std::vector<double> values(train_idx.size());
              for (std::size_t i = 0; i < train_idx.size(); ++i) {
                values[i] = affect::measure_for(windows.measures[train_idx[i]], strategy);
              }
              const auto th = affect::compute_threshold(values, strategy);
              rec.contrastive_threshold = th.median_value;
              for (std::size_t i = 0; i < train_idx.size(); ++i) {
                contrastive[i] = affect::assign_label(windows.measures[train_idx[i]], th)->category();
              }
            }
            auto encoder = training::train_encoder_scl(train_x, contrastive, cfg);
            const numcore::Network snapshot = encoder.net;
            auto probe = training::train_probe(encoder.net, train_x, train_y, cfg);
            rec.encoder_frozen = encoder.net.same_parameters(snapshot);
            if (!*rec.encoder_frozen) throw InternalError(where + "probe training modified the encoder");
            rec.encoder_epochs = encoder.report.epoch_loss.size();
            rec.head_epochs = probe.report.epoch_loss.size();
            model = numcore::stack(encoder.net, probe.net);
          }
          rec.accuracy = evaluate_accuracy(model, test_x, test_y, settings.train.exec);
        }
      } catch (const std::exception& e) {
        throw TrainingError(where + e.what());
      }
      log::debug(where + "accuracy " + std::to_string(rec.accuracy));
      result.folds.push_back(std::move(rec));
    }
  }
  return result;
}

Summary aggregate(const ExperimentResult& result) {
  if (result.folds.empty()) throw ConfigError("aggregate: empty result");
  Summary s;
  auto values = result.accuracies();
  s.n_values = values.size();
  s.best_fold_accuracy = *std::max_element(values.begin(), values.end());
  s.mean_accuracy = sorted_mean(std::move(values));

  std::vector<double> majority;
  for (const auto& f : result.folds) majority.push_back(f.majority_accuracy);
  s.majority_accuracy = sorted_mean(std::move(majority));

  auto runs = result.run_means();
  std::sort(runs.begin(), runs.end());
  if (runs.size() >= 2) {
    const double n = static_cast<double>(runs.size());
    const double sd = std::sqrt(sample_variance(runs));
    s.ci95_half_width = student_t_quantile(0.975, n - 1.0) * sd / std::sqrt(n);
  }
  return s;
}

}  // namespace affectcl::evaluation
