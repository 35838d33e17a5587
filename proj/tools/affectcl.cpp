// Command-line driver: synth / run / compare.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "affectcl/cli/commands.hpp"
#include "affectcl/errors.hpp"
#include "affectcl/kernels.hpp"
#include "affectcl/log.hpp"

namespace {

using namespace affectcl;

void add_verbosity(CLI::App& app, int& verbosity) {
  app.add_flag("-v,--verbose", verbosity, "More logging (repeat for debug)");
}

void apply_verbosity(int verbosity) {
  if (verbosity >= 2) {
    log::set_level(log::Level::debug);
  } else if (verbosity == 1) {
    log::set_level(log::Level::info);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised contrastive affect representations: corpus synthesis, experiment grid, significance tests"};
  app.require_subcommand(1);
  app.fallthrough();
  int verbosity = 0;
  add_verbosity(app, verbosity);

  // synth
  cli::SynthSpec synth;
  std::string snr_text = "0.05";
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus with known ground truth");
  synth_cmd->add_option("-o,--output", synth.output, "Corpus root to create")->required();
  synth_cmd->add_option("--participants", synth.synth.n_participants, "Number of participants")
      ->capture_default_str();
  synth_cmd->add_option("--session-length", synth.synth.session_length_s, "Session length (s)")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--snr", snr_text, "Feature signal-to-noise power ratio ('inf' allowed)")
      ->capture_default_str();
  synth_cmd->add_option("--annotators", synth.synth.n_annotators, "Annotators per session")
      ->capture_default_str();
  synth_cmd->add_option("--annotation-rate", synth.synth.annotation_rate_hz, "Annotation rate (Hz)")
      ->capture_default_str();
  synth_cmd->add_option("--feature-rate", synth.synth.feature_rate_hz, "Feature frame rate (Hz)")
      ->capture_default_str();
  std::vector<std::size_t> dims;
  synth_cmd->add_option("--dims", dims, "Feature counts: audio video physiology")
      ->expected(3);

  // run
  cli::ExperimentSpec run;
  std::vector<std::string> method_names;
  std::string exec_name = "serial";
  int threads = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the cross-validated experiment grid");
  run_cmd->add_option("-c,--corpus", run.corpus_root, "Corpus root")->required();
  run_cmd->add_option("-o,--output", run.output_dir, "Results directory")->required();
  run_cmd->add_option("--methods", method_names, "E_HL E_CU E_UD E_b majority");
  run_cmd->add_option("--windows", run.window_lengths_s, "Window lengths (s)");
  run_cmd->add_option("--step", run.step_s, "Sliding step (s)")->capture_default_str();
  run_cmd->add_option("--modalities", run.modalities,
                      "Modality configs, e.g. audio video physiology audio+video all");
  run_cmd->add_option("--runs", run.n_runs, "Independent runs")->capture_default_str();
  run_cmd->add_option("--folds", run.k_folds, "Participant-disjoint folds")->capture_default_str();
  run_cmd->add_option("--epsilon", run.epsilon, "High/low ambiguity band")->capture_default_str();
  run_cmd->add_option("--lr", run.train.lr, "Adam learning rate")->capture_default_str();
  run_cmd->add_option("--batch-size", run.train.batch_size, "Minibatch size")->capture_default_str();
  run_cmd->add_option("--temperature", run.train.temperature, "Contrastive temperature")
      ->capture_default_str();
  run_cmd->add_option("--patience", run.train.patience_epochs, "Early-stopping patience (epochs)")
      ->capture_default_str();
  run_cmd->add_option("--max-epochs", run.train.max_epochs, "Epoch cap")->capture_default_str();
  run_cmd->add_option("--hidden", run.train.hidden_units, "Encoder units")->capture_default_str();
  run_cmd->add_option("--seed", run.base_seed, "Base seed; run r uses seed + r")->capture_default_str();
  run_cmd->add_option("--dimension", run.dimension, "Annotation dimension")->capture_default_str();
  run_cmd->add_flag("--shuffle-labels", run.shuffle_labels,
                    "Control: permute affect measures across windows");
  run_cmd->add_option("-j,--jobs", run.jobs, "Grid cells run concurrently")->capture_default_str();
  run_cmd->add_option("--exec", exec_name, "Kernel execution: serial or parallel")
      ->check(CLI::IsMember({"serial", "parallel"}))
      ->capture_default_str();
  run_cmd->add_option("--threads", threads, "OpenMP threads for parallel kernels");

  // compare
  cli::CompareSpec cmp;
  std::string cmp_output;
  auto* cmp_cmd = app.add_subcommand("compare", "Per-cell two-tailed t-test between two result sets");
  cmp_cmd->add_option("results_a", cmp.results_a, "Results directory or cell file")->required();
  cmp_cmd->add_option("results_b", cmp.results_b, "Results directory or cell file")->required();
  cmp_cmd->add_option("--method-a", cmp.method_a, "Select this method from A (match by window, modality)");
  cmp_cmd->add_option("--method-b", cmp.method_b, "Select this method from B");
  cmp_cmd->add_option("--alpha", cmp.alpha, "Significance threshold")->capture_default_str();
  cmp_cmd->add_option("-o,--output", cmp_output, "Directory for compare.json / compare.csv");

  CLI11_PARSE(app, argc, argv);
  apply_verbosity(verbosity);

  try {
    if (*synth_cmd) {
      if (snr_text == "inf" || snr_text == "infinity") {
        synth.synth.snr = std::numeric_limits<double>::infinity();
      } else {
        synth.synth.snr = std::stod(snr_text);
      }
      if (!dims.empty()) std::copy(dims.begin(), dims.end(), synth.synth.dims.begin());
      cli::cmd_synth(synth);
      std::cout << "wrote " << synth.synth.n_participants << " sessions to " << synth.output.string()
                << "\n";
      return 0;
    }
    if (*run_cmd) {
      if (!method_names.empty()) {
        run.methods.clear();
        for (const auto& m : method_names) run.methods.push_back(evaluation::parse_method(m));
      }
      run.train.exec = exec_name == "parallel" ? Exec::parallel : Exec::serial;
      if (threads > 0) kernels::set_threads(threads);
      const auto outcome = cli::cmd_run(run);
      std::cout << outcome.cells - outcome.failed << "/" << outcome.cells << " cells completed; summary at "
                << (run.output_dir / "summary.csv").string() << "\n";
      for (const auto& e : outcome.errors) std::cerr << "failed: " << e << "\n";
      return outcome.failed == 0 ? 0 : 1;
    }
    if (*cmp_cmd) {
      if (!cmp_output.empty()) cmp.output = cmp_output;
      const auto rows = cli::cmd_compare(cmp);
      std::cout << cli::render_compare(rows, cmp.alpha);
      return 0;
    }
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
