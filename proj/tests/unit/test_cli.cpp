#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <unistd.h>

#include "affectcl/cli/commands.hpp"
#include "affectcl/errors.hpp"
#include "affectcl/evaluation/results_io.hpp"
#include "affectcl/evaluation/stats.hpp"
#include "oracles.hpp"

using namespace affectcl;
using namespace affectcl::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("affectcl_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

SynthSpec small_synth(const fs::path& out, std::size_t participants = 6) {
  SynthSpec s;
  s.output = out;
  s.synth.n_participants = participants;
  s.synth.session_length_s = 30.0;
  s.synth.dims = {5, 3, 4};
  s.synth.snr = 0.5;
  return s;
}

ExperimentSpec small_run(const fs::path& corpus, const fs::path& out) {
  ExperimentSpec s;
  s.corpus_root = corpus;
  s.output_dir = out;
  s.n_runs = 2;
  s.k_folds = 2;
  s.methods = {evaluation::Method::e_hl, evaluation::Method::e_b};
  s.window_lengths_s = {2.0};
  s.modalities = {"audio"};
  s.train.max_epochs = 6;
  s.train.patience_epochs = 2;
  s.train.batch_size = 32;
  return s;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AFFECTCL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("synth writes the documented layout") {
  TempDir dir("synth");
  SynthSpec spec;
  spec.output = dir.path / "corpus";
  spec.synth.session_length_s = 4.0;
  cmd_synth(spec);
  std::set<std::string> participants;
  for (const auto& p : fs::directory_iterator(spec.output)) {
    participants.insert(p.path().filename().string());
    std::size_t features = 0, annotations = 0;
    for (const auto& f : fs::directory_iterator(p.path())) {
      const auto name = f.path().filename().string();
      features += name.starts_with("features_");
      annotations += name.starts_with("annotations_arousal_");
    }
    CHECK(features == 3);
    CHECK(annotations == 6);
  }
  CHECK(participants.size() == 23);
  CHECK(participants.count("P01") == 1);
  CHECK(participants.count("P23") == 1);
  CHECK(slurp(spec.output / "P01" / "features_audio.csv").starts_with("time_s,f0,f1,"));
  CHECK(slurp(spec.output / "P01" / "annotations_arousal_A1.csv").starts_with("time_s,value\n"));
}

TEST_CASE("synth is byte-reproducible and refuses a single participant") {
  TempDir dir("synth_repeat");
  cmd_synth(small_synth(dir.path / "a"));
  cmd_synth(small_synth(dir.path / "b"));
  CHECK(tree(dir.path / "a") == tree(dir.path / "b"));
  CHECK_THROWS_AS(cmd_synth(small_synth(dir.path / "c", 1)), ConfigError);
}

TEST_CASE("run writes one file per cell and a reproducible summary") {
  TempDir dir("run");
  cmd_synth(small_synth(dir.path / "corpus"));
  auto spec = small_run(dir.path / "corpus", dir.path / "out1");
  spec.methods = {evaluation::Method::e_cu};
  auto outcome = cmd_run(spec);
  CHECK(outcome.cells == 1);
  CHECK(outcome.failed == 0);
  std::size_t files = 0;
  for (const auto& f : fs::directory_iterator(dir.path / "out1" / "cells")) files += f.is_regular_file();
  CHECK(files == 1);
  CHECK(fs::exists(dir.path / "out1" / "cells" / "E_CU_w2_audio.json"));
  CHECK(fs::exists(dir.path / "out1" / "spec.json"));

  spec.output_dir = dir.path / "out2";
  cmd_run(spec);
  CHECK(slurp(dir.path / "out1" / "summary.csv") == slurp(dir.path / "out2" / "summary.csv"));
  CHECK(slurp(dir.path / "out1" / "summary.json") != "");

  spec.output_dir = dir.path / "out3";
  spec.jobs = 3;
  spec.methods = {evaluation::Method::e_cu};
  cmd_run(spec);
  CHECK(slurp(dir.path / "out1" / "summary.csv") == slurp(dir.path / "out3" / "summary.csv"));
}

TEST_CASE("full grid yields 80 cells") {
  TempDir dir("grid");
  cmd_synth(small_synth(dir.path / "corpus"));
  ExperimentSpec spec = small_run(dir.path / "corpus", dir.path / "out");
  spec.methods = {std::begin(evaluation::kModelMethods), std::end(evaluation::kModelMethods)};
  spec.window_lengths_s = {1.0, 2.0, 3.0, 4.0};
  spec.modalities = {"audio", "video", "physiology", "audio+video", "all"};
  spec.n_runs = 1;
  spec.train.max_epochs = 2;
  spec.train.patience_epochs = 1;
  spec.jobs = 2;
  const auto outcome = cmd_run(spec);
  CHECK(outcome.cells == 80);
  CHECK(outcome.failed == 0);
  std::size_t files = 0;
  for (const auto& f : fs::directory_iterator(dir.path / "out" / "cells")) files += f.is_regular_file();
  CHECK(files == 80);
  CHECK(load_results(dir.path / "out").size() == 80);
}

TEST_CASE("a failing cell is recorded while the rest still run") {
  TempDir dir("fail");
  cmd_synth(small_synth(dir.path / "corpus"));
  auto spec = small_run(dir.path / "corpus", dir.path / "out");
  spec.modalities = {"audio", "smell"};
  const auto outcome = cmd_run(spec);
  CHECK(outcome.cells == 4);
  CHECK(outcome.failed == 2);
  CHECK(outcome.errors.size() == 2);
  CHECK(load_results(dir.path / "out").size() == 2);
  CHECK(slurp(dir.path / "out" / "summary.csv").find(",error\n") != std::string::npos);
}

TEST_CASE("emitted files reproduce their summaries exactly") {
  TempDir dir("roundtrip");
  cmd_synth(small_synth(dir.path / "corpus"));
  cmd_run(small_run(dir.path / "corpus", dir.path / "out"));

  const auto summary = evaluation::read_json(dir.path / "out" / "summary.json");
  std::map<std::string, evaluation::Summary> recorded;
  for (const auto& c : summary.at("cells")) {
    recorded[c.at("key")] = evaluation::summary_from_json(c.at("summary"));
  }
  const auto results = load_results(dir.path / "out");
  REQUIRE(results.size() == 2);
  for (const auto& r : results) CHECK(evaluation::aggregate(r) == recorded.at(evaluation::cell_key(r)));

  std::istringstream csv(slurp(dir.path / "out" / "summary.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
    const auto key = evaluation::cell_key(f[0], std::stod(f[1]), f[2]);
    CHECK(std::strtod(f[3].c_str(), nullptr) == recorded.at(key).mean_accuracy);
    CHECK(std::strtod(f[4].c_str(), nullptr) == recorded.at(key).ci95_half_width);
  }
}

TEST_CASE("compare") {
  TempDir dir("compare");
  cmd_synth(small_synth(dir.path / "corpus"));
  cmd_run(small_run(dir.path / "corpus", dir.path / "out"));

  CompareSpec self{dir.path / "out", dir.path / "out"};
  const auto rows = cmd_compare(self);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    if (r.degenerate) continue;
    CHECK(*r.p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*r.t == 0.0);
  }

  CompareSpec methods{dir.path / "out", dir.path / "out", "E_HL", "E_b", dir.path / "cmp"};
  const auto across = cmd_compare(methods);
  REQUIRE(across.size() == 1);
  const auto results = load_results(dir.path / "out");
  const evaluation::ExperimentResult* hl = nullptr;
  const evaluation::ExperimentResult* eb = nullptr;
  for (const auto& r : results) (r.method == evaluation::Method::e_hl ? hl : eb) = &r;
  const auto ra = hl->run_means(), rb = eb->run_means();
  if (!across[0].degenerate) {
    CHECK(*across[0].t == doctest::Approx(testing::pooled_t(ra, rb)).epsilon(1e-12));
    CHECK(std::fabs(*across[0].p - testing::boost_two_sided_p(*across[0].t, ra.size() + rb.size() - 2.0)) < 1e-6);
  }
  const auto report = render_compare(across, 0.05);
  CHECK(report.find("E_HL") != std::string::npos);
  CHECK(report.find("E_b") != std::string::npos);
  CHECK(fs::exists(dir.path / "cmp" / "compare.csv"));
  CHECK(fs::exists(dir.path / "cmp" / "compare.json"));

  auto other = small_run(dir.path / "corpus", dir.path / "other");
  other.methods = {evaluation::Method::e_hl};
  cmd_run(other);
  CHECK_THROWS_WITH_AS(cmd_compare({dir.path / "out", dir.path / "other"}),
                       doctest::Contains("E_b|w2|audio missing"), ConfigError);
}

TEST_CASE("command-line exit codes") {
  TempDir dir("exit");
  const std::string corpus = (dir.path / "corpus").string();
  CHECK(run_cli("synth --output " + corpus + " --participants 6 --session-length 30 --dims 5 3 4") == 0);
  CHECK(run_cli("synth --output " + (dir.path / "bad").string() + " --participants 1") != 0);
  CHECK(run_cli("run --corpus " + corpus + " --output " + (dir.path / "out").string() +
                " --methods majority --windows 2 --modalities audio --runs 1 --folds 2") == 0);
  CHECK(run_cli("run --corpus " + corpus + " --output " + (dir.path / "out2").string() +
                " --methods majority --windows 2 --modalities smell --runs 1 --folds 2") != 0);
  CHECK(run_cli("compare " + (dir.path / "out").string() + " " + (dir.path / "out").string()) == 0);
  CHECK(run_cli("run --corpus " + (dir.path / "missing").string() + " --output " +
                (dir.path / "out3").string()) != 0);
  CHECK(run_cli("bogus") != 0);
}
