#include "affectcl/evaluation/results_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "affectcl/errors.hpp"

namespace affectcl::evaluation {

using nlohmann::json;

std::string cell_key(std::string_view method, double window_length_s, std::string_view modality) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", window_length_s);
  return std::string(method) + "|w" + buf + "|" + std::string(modality);
}

std::string cell_key(const ExperimentResult& r) {
  return cell_key(to_string(r.method), r.window_length_s, r.modality);
}

json to_json(const Summary& s) {
  return {{"mean_accuracy", s.mean_accuracy},
          {"ci95_half_width", s.ci95_half_width},
          {"best_fold_accuracy", s.best_fold_accuracy},
          {"majority_accuracy", s.majority_accuracy},
          {"n_values", s.n_values}};
}

Summary summary_from_json(const json& j) {
  Summary s;
  s.mean_accuracy = j.at("mean_accuracy").get<double>();
  s.ci95_half_width = j.at("ci95_half_width").get<double>();
  s.best_fold_accuracy = j.at("best_fold_accuracy").get<double>();
  s.majority_accuracy = j.at("majority_accuracy").get<double>();
  s.n_values = j.at("n_values").get<std::size_t>();
  return s;
}

json to_json(const ExperimentResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    json jf = {{"run", f.run},
               {"fold", f.fold},
               {"seed", f.seed},
               {"train_participants", f.train_participants},
               {"test_participants", f.test_participants},
               {"n_train", f.n_train},
               {"n_test", f.n_test},
               {"accuracy", f.accuracy},
               {"majority_accuracy", f.majority_accuracy},
               {"encoder_epochs", f.encoder_epochs},
               {"head_epochs", f.head_epochs}};
    jf["contrastive_threshold"] =
        f.contrastive_threshold ? json(*f.contrastive_threshold) : json(nullptr);
    jf["encoder_frozen"] = f.encoder_frozen ? json(*f.encoder_frozen) : json(nullptr);
    folds.push_back(std::move(jf));
  }
  return {{"key", cell_key(r)},
          {"method", std::string(to_string(r.method))},
          {"window_length_s", r.window_length_s},
          {"modality", r.modality},
          {"k_folds", r.k_folds},
          {"n_runs", r.n_runs},
          {"run_seeds", r.run_seeds},
          {"hl_median", r.hl_median},
          {"epsilon", r.epsilon},
          {"folds", std::move(folds)},
          {"summary", to_json(aggregate(r))}};
}

ExperimentResult result_from_json(const json& j) {
  ExperimentResult r;
  try {
    r.method = parse_method(j.at("method").get<std::string>());
    r.window_length_s = j.at("window_length_s").get<double>();
    r.modality = j.at("modality").get<std::string>();
    r.k_folds = j.at("k_folds").get<std::size_t>();
    r.n_runs = j.at("n_runs").get<std::size_t>();
    r.run_seeds = j.at("run_seeds").get<std::vector<std::uint64_t>>();
    r.hl_median = j.at("hl_median").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    for (const auto& jf : j.at("folds")) {
      FoldRecord f;
      f.run = jf.at("run").get<std::size_t>();
      f.fold = jf.at("fold").get<std::size_t>();
      f.seed = jf.at("seed").get<std::uint64_t>();
      f.train_participants = jf.at("train_participants").get<std::vector<std::string>>();
      f.test_participants = jf.at("test_participants").get<std::vector<std::string>>();
      f.n_train = jf.at("n_train").get<std::size_t>();
      f.n_test = jf.at("n_test").get<std::size_t>();
      f.accuracy = jf.at("accuracy").get<double>();
      f.majority_accuracy = jf.at("majority_accuracy").get<double>();
      f.encoder_epochs = jf.value("encoder_epochs", std::size_t{0});
      f.head_epochs = jf.value("head_epochs", std::size_t{0});
      if (!jf.at("contrastive_threshold").is_null()) {
        f.contrastive_threshold = jf["contrastive_threshold"].get<double>();
      }
      if (!jf.at("encoder_frozen").is_null()) f.encoder_frozen = jf["encoder_frozen"].get<bool>();
      r.folds.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed results file: ") + e.what());
  }
  return r;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace affectcl::evaluation
