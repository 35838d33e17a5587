#include "affectcl/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "affectcl/corpus/loader.hpp"
#include "affectcl/corpus/windowing.hpp"
#include "affectcl/errors.hpp"
#include "affectcl/evaluation/results_io.hpp"
#include "affectcl/evaluation/stats.hpp"
#include "affectcl/log.hpp"

namespace affectcl::cli {
namespace fs = std::filesystem;
using nlohmann::json;
using evaluation::ExperimentResult;

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_name_for(const std::string& key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '|', '_');
  return name + ".json";
}

std::array<std::size_t, 3> dims_of(const std::vector<corpus::Session>& sessions) {
  std::array<std::size_t, 3> dims = corpus::kReferenceDims;
  for (auto m : corpus::kAllModalities) {
    for (const auto& s : sessions) {
      const auto it = s.streams.find(m);
      if (it != s.streams.end()) {
        dims[static_cast<std::size_t>(m)] = it->second.frames.cols();
        break;
      }
    }
  }
  return dims;
}

struct Cell {
  std::size_t corpus_index;
  evaluation::Method method;
  std::string key;
  std::optional<ExperimentResult> result;
  std::string error;
};

}  // namespace

void cmd_synth(const SynthSpec& spec) {
  if (spec.output.empty()) throw ConfigError("synth: output directory required");
  const auto sessions = corpus::generate_synthetic(spec.synth);
  corpus::write_corpus(spec.output, sessions, {spec.dimension});
  log::info("synth: wrote " + std::to_string(sessions.size()) + " sessions to " +
            spec.output.string());
}

void ExperimentSpec::validate() const {
  if (corpus_root.empty()) throw ConfigError("run: corpus root required");
  if (output_dir.empty()) throw ConfigError("run: output directory required");
  if (methods.empty() || window_lengths_s.empty() || modalities.empty()) {
    throw ConfigError("run: methods, window lengths and modalities must be non-empty");
  }
  if (!(step_s > 0.0)) throw ConfigError("run: step must be > 0");
  for (double w : window_lengths_s) {
    if (!(w > 0.0)) throw ConfigError("run: window lengths must be > 0");
  }
  if (n_runs == 0) throw ConfigError("run: n_runs must be > 0");
  if (k_folds < 2) throw ConfigError("run: k_folds must be >= 2");
  if (!(epsilon >= 0.0)) throw ConfigError("run: epsilon must be >= 0");
  if (jobs == 0) throw ConfigError("run: jobs must be > 0");
  train.validate();
}

json ExperimentSpec::to_json() const {
  json m = json::array();
  for (auto x : methods) m.push_back(std::string(evaluation::to_string(x)));
  return {{"corpus_root", corpus_root.string()},
          {"methods", m},
          {"window_lengths_s", window_lengths_s},
          {"step_s", step_s},
          {"modalities", modalities},
          {"n_runs", n_runs},
          {"k_folds", k_folds},
          {"epsilon", epsilon},
          {"train",
           {{"lr", train.lr},
            {"batch_size", train.batch_size},
            {"temperature", train.temperature},
            {"patience_epochs", train.patience_epochs},
            {"max_epochs", train.max_epochs},
            {"hidden_units", train.hidden_units}}},
          {"base_seed", base_seed},
          {"dimension", dimension},
          {"shuffle_labels", shuffle_labels}};
}

RunOutcome cmd_run(const ExperimentSpec& spec) {
  spec.validate();
  const auto loaded = corpus::load_corpus(spec.corpus_root, {spec.dimension});
  for (const auto& w : loaded.report.warnings) log::warn(w);
  if (loaded.sessions.size() < spec.k_folds) {
    throw ConfigError("run: " + std::to_string(loaded.sessions.size()) +
                      " participants cannot form " + std::to_string(spec.k_folds) + " folds");
  }
  const auto dims = dims_of(loaded.sessions);

  std::error_code ec;
  fs::create_directories(spec.output_dir / "cells", ec);
  if (ec) throw ConfigError("cannot create " + (spec.output_dir / "cells").string());
  evaluation::write_text_atomic(spec.output_dir / "spec.json", spec.to_json().dump(2) + "\n");

  // Window and label every (window length, modality) pair up front.
  struct Prepared {
    double window;
    std::string modality;
    std::optional<evaluation::LabeledCorpus> corpus;
    std::string error;
  };
  std::vector<Prepared> prepared;
  for (double w : spec.window_lengths_s) {
    for (const auto& mod_name : spec.modalities) {
      Prepared p{w, mod_name, std::nullopt, {}};
      try {
        const auto modality = corpus::ModalityConfig::parse(mod_name, dims);
        p.modality = modality.name();
        std::vector<std::string> warnings;
        auto windows = corpus::build_windows(loaded.sessions, w, spec.step_s, modality,
                                             Exec::serial, &warnings);
        if (!warnings.empty()) {
          log::warn(std::to_string(warnings.size()) + " windowing warnings for w=" + full(w) +
                    " " + p.modality + " (first: " + warnings.front() + ")");
        }
        if (spec.shuffle_labels) windows = evaluation::permute_measures(std::move(windows), spec.base_seed);
        p.corpus = evaluation::label_corpus(windows, spec.epsilon);
      } catch (const std::exception& e) {
        p.error = e.what();
      }
      prepared.push_back(std::move(p));
    }
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    for (auto m : spec.methods) {
      cells.push_back({i, m,
                       evaluation::cell_key(evaluation::to_string(m), prepared[i].window,
                                            prepared[i].modality),
                       std::nullopt, prepared[i].error});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto& cell = cells[i];
      if (!cell.error.empty()) continue;
      const auto& prep = prepared[cell.corpus_index];
      try {
        evaluation::ExperimentSettings settings;
        settings.n_runs = spec.n_runs;
        settings.k_folds = spec.k_folds;
        settings.base_seed = spec.base_seed;
        settings.train = spec.train;
        settings.modality = prep.modality;
        auto result = evaluation::run_experiment(*prep.corpus, cell.method, settings);
        evaluation::write_text_atomic(spec.output_dir / "cells" / file_name_for(cell.key),
                                      evaluation::to_json(result).dump(2) + "\n");
        log::info("cell " + cell.key + " done");
        cell.result = std::move(result);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n_workers = std::min(spec.jobs, cells.size());
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  RunOutcome outcome;
  outcome.cells = cells.size();
  std::string csv =
      "method,window_length_s,modality,mean_accuracy,ci95_half_width,best_fold_accuracy,"
      "majority_accuracy,n_values,status\n";
  json summary_cells = json::array();
  for (const auto& cell : cells) {
    const auto& prep = prepared[cell.corpus_index];
    const std::string method(evaluation::to_string(cell.method));
    if (cell.result) {
      const auto s = evaluation::aggregate(*cell.result);
      csv += method + "," + full(prep.window) + "," + prep.modality + "," + full(s.mean_accuracy) +
             "," + full(s.ci95_half_width) + "," + full(s.best_fold_accuracy) + "," +
             full(s.majority_accuracy) + "," + std::to_string(s.n_values) + ",ok\n";
      summary_cells.push_back({{"key", cell.key},
                               {"file", "cells/" + file_name_for(cell.key)},
                               {"status", "ok"},
                               {"summary", evaluation::to_json(s)}});
    } else {
      ++outcome.failed;
      outcome.errors.push_back(cell.key + ": " + cell.error);
      log::error("cell " + cell.key + " failed: " + cell.error);
      csv += method + "," + full(prep.window) + "," + prep.modality + ",,,,,0,error\n";
      summary_cells.push_back({{"key", cell.key}, {"status", "error"}, {"error", cell.error}});
    }
  }
  evaluation::write_text_atomic(spec.output_dir / "summary.csv", csv);
  evaluation::write_text_atomic(
      spec.output_dir / "summary.json",
      json{{"spec", spec.to_json()}, {"cells", summary_cells}}.dump(2) + "\n");
  return outcome;
}

std::vector<ExperimentResult> load_results(const fs::path& path) {
  std::vector<ExperimentResult> out;
  if (fs::is_directory(path)) {
    const auto summary = evaluation::read_json(path / "summary.json");
    for (const auto& c : summary.at("cells")) {
      if (c.value("status", "") != "ok") continue;
      out.push_back(evaluation::result_from_json(
          evaluation::read_json(path / c.at("file").get<std::string>())));
    }
    return out;
  }
  const auto j = evaluation::read_json(path);
  if (j.contains("cells")) {
    const auto base = path.parent_path();
    for (const auto& c : j.at("cells")) {
      if (c.value("status", "") != "ok") continue;
      out.push_back(evaluation::result_from_json(
          evaluation::read_json(base / c.at("file").get<std::string>())));
    }
  } else {
    out.push_back(evaluation::result_from_json(j));
  }
  return out;
}

std::vector<CompareRow> cmd_compare(const CompareSpec& spec) {
  if (spec.method_a.has_value() != spec.method_b.has_value()) {
    throw ConfigError("compare: give both --method-a and --method-b or neither");
  }
  const bool by_method = spec.method_a.has_value();
  auto index = [&](const fs::path& p, const std::optional<std::string>& method) {
    std::map<std::string, ExperimentResult> cells;
    for (auto& r : load_results(p)) {
      std::string key = evaluation::cell_key(r);
      if (by_method) {
        if (evaluation::to_string(r.method) != *method) continue;
        key = evaluation::cell_key("*", r.window_length_s, r.modality);
      }
      cells.emplace(key, std::move(r));
    }
    return cells;
  };
  const auto a = index(spec.results_a, spec.method_a);
  const auto b = index(spec.results_b, spec.method_b);
  if (a.empty()) throw ConfigError("compare: no matching cells in " + spec.results_a.string());

  std::vector<std::string> missing;
  for (const auto& [k, _] : a) {
    if (!b.count(k)) missing.push_back(k + " missing from " + spec.results_b.string());
  }
  for (const auto& [k, _] : b) {
    if (!a.count(k)) missing.push_back(k + " missing from " + spec.results_a.string());
  }
  if (!missing.empty()) {
    std::string msg = "compare: result grids do not match";
    for (const auto& m : missing) msg += "\n  " + m;
    throw ConfigError(msg);
  }

  std::vector<CompareRow> rows;
  for (const auto& [key, ra] : a) {
    const auto& rb = b.at(key);
    CompareRow row;
    row.key = key;
    row.method_a = evaluation::to_string(ra.method);
    row.method_b = evaluation::to_string(rb.method);
    row.mean_a = evaluation::aggregate(ra).mean_accuracy;
    row.mean_b = evaluation::aggregate(rb).mean_accuracy;
    const auto runs_a = ra.run_means();
    const auto runs_b = rb.run_means();
    try {
      const auto t = evaluation::t_test_two_tailed(runs_a, runs_b);
      row.t = t.t;
      row.p = t.p;
      row.significant = t.p < spec.alpha;
    } catch (const DegenerateInputError&) {
      row.degenerate = true;
    } catch (const ConfigError&) {
      row.degenerate = true;
    }
    rows.push_back(std::move(row));
  }

  if (spec.output) {
    json out = json::array();
    std::string csv = "key,method_a,method_b,mean_a,mean_b,t,p,significant,degenerate\n";
    for (const auto& r : rows) {
      out.push_back({{"key", r.key},
                     {"method_a", r.method_a},
                     {"method_b", r.method_b},
                     {"mean_a", r.mean_a},
                     {"mean_b", r.mean_b},
                     {"t", r.t ? json(*r.t) : json(nullptr)},
                     {"p", r.p ? json(*r.p) : json(nullptr)},
                     {"significant", r.significant},
                     {"degenerate", r.degenerate}});
      csv += r.key + "," + r.method_a + "," + r.method_b + "," + full(r.mean_a) + "," +
             full(r.mean_b) + "," + (r.t ? full(*r.t) : "") + "," + (r.p ? full(*r.p) : "") + "," +
             (r.significant ? "1" : "0") + "," + (r.degenerate ? "1" : "0") + "\n";
    }
    fs::create_directories(*spec.output);
    evaluation::write_text_atomic(*spec.output / "compare.json", out.dump(2) + "\n");
    evaluation::write_text_atomic(*spec.output / "compare.csv", csv);
  }
  return rows;
}

std::string render_compare(const std::vector<CompareRow>& rows, double alpha) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-8s %-8s %8s %8s %9s %9s  %s\n", "cell", "A", "B",
                "mean A", "mean B", "t", "p", "flag");
  out += line;
  for (const auto& r : rows) {
    const char* flag = r.degenerate ? "degenerate" : (r.significant ? "significant" : "-");
    if (r.t) {
      std::snprintf(line, sizeof line, "%-28s %-8s %-8s %8.4f %8.4f %9.4f %9.4g  %s\n",
                    r.key.c_str(), r.method_a.c_str(), r.method_b.c_str(), r.mean_a, r.mean_b,
                    *r.t, *r.p, flag);
    } else {
      std::snprintf(line, sizeof line, "%-28s %-8s %-8s %8.4f %8.4f %9s %9s  %s\n", r.key.c_str(),
                    r.method_a.c_str(), r.method_b.c_str(), r.mean_a, r.mean_b, "n/a", "n/a", flag);
    }
    out += line;
  }
  std::snprintf(line, sizeof line, "significance threshold: p < %g (two-tailed Student's t)\n", alpha);
  out += line;
  return out;
}

}  // namespace affectcl::cli
