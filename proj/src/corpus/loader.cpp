#include "affectcl/corpus/loader.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "affectcl/errors.hpp"

namespace affectcl::corpus {
namespace fs = std::filesystem;
namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                                   : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

// Appends problems to `issues`; returns false when the file is unusable.
bool read_csv(const fs::path& path, CsvTable& table, std::vector<std::string>& issues) {
  std::ifstream in(path);
  if (!in) {
    issues.push_back(path.string() + ": cannot open");
    return false;
  }
  std::string line;
  if (!std::getline(in, line)) {
    issues.push_back(path.string() + ": empty file");
    return false;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  for (auto f : split(line)) table.header.emplace_back(f);
  if (table.header.empty() || table.header.front() != "time_s") {
    issues.push_back(path.string() + ": header must start with time_s");
    return false;
  }
  const std::size_t width = table.header.size();
  std::size_t row_no = 1;
  const std::size_t before = issues.size();
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width) {
      issues.push_back(path.string() + ": row " + std::to_string(row_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
      continue;
    }
    std::vector<double> row(width);
    bool ok = true;
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_double(fields[c], row[c])) {
        issues.push_back(path.string() + ": row " + std::to_string(row_no) + " column " +
                         table.header[c] + " is not a finite number");
        ok = false;
        break;
      }
    }
    if (ok) table.rows.push_back(std::move(row));
  }
  return issues.size() == before;
}

bool check_increasing(const fs::path& path, const CsvTable& t, std::vector<std::string>& issues) {
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    if (!(t.rows[r][0] > t.rows[r - 1][0])) {
      issues.push_back(path.string() + ": row " + std::to_string(r + 2) +
                       " timestamp not strictly increasing");
      return false;
    }
  }
  return true;
}

double snap_rate(double rate) {
  const double rounded = std::round(rate * 1000.0) / 1000.0;
  return std::abs(rate - rounded) < 1e-6 * std::max(1.0, rate) ? rounded : rate;
}

std::optional<FeatureStream> load_features(const fs::path& path, std::vector<std::string>& issues) {
  CsvTable t;
  if (!read_csv(path, t, issues)) return std::nullopt;
  if (t.header.size() < 2) {
    issues.push_back(path.string() + ": no feature columns");
    return std::nullopt;
  }
  if (t.rows.empty()) {
    issues.push_back(path.string() + ": no rows");
    return std::nullopt;
  }
  if (!check_increasing(path, t, issues)) return std::nullopt;
  FeatureStream s;
  s.frames.resize(t.rows.size(), t.header.size() - 1);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    s.times.push_back(t.rows[r][0]);
    std::copy(t.rows[r].begin() + 1, t.rows[r].end(), s.frames.row(r).begin());
  }
  return s;
}

std::optional<AnnotationTrace> load_annotation(const fs::path& path, std::string annotator,
                                               std::vector<std::string>& issues) {
  CsvTable t;
  if (!read_csv(path, t, issues)) return std::nullopt;
  if (t.header.size() != 2 || t.header[1] != "value") {
    issues.push_back(path.string() + ": header must be time_s,value");
    return std::nullopt;
  }
  if (t.rows.size() < 2) {
    issues.push_back(path.string() + ": fewer than 2 samples");
    return std::nullopt;
  }
  if (!check_increasing(path, t, issues)) return std::nullopt;
  bool ok = true;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double v = t.rows[r][1];
    if (!(v >= -1.0 && v <= 1.0)) {
      issues.push_back(path.string() + ": row " + std::to_string(r + 2) + " value " +
                       std::to_string(v) + " outside [-1, 1]");
      ok = false;
    }
  }
  const double t0 = t.rows.front()[0];
  const double dt = (t.rows.back()[0] - t0) / static_cast<double>(t.rows.size() - 1);
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    const double step = t.rows[r][0] - t.rows[r - 1][0];
    if (std::abs(step - dt) > 1e-6 + 1e-3 * dt) {
      issues.push_back(path.string() + ": row " + std::to_string(r + 2) +
                       " breaks the uniform sample rate");
      ok = false;
      break;
    }
  }
  if (!ok) return std::nullopt;
  AnnotationTrace trace{std::move(annotator), {}, snap_rate(1.0 / dt), t0};
  trace.values.reserve(t.rows.size());
  for (const auto& row : t.rows) trace.values.push_back(row[1]);
  return trace;
}

void write_number(std::string& buf, double v, const char* fmt) {
  char tmp[40];
  const int n = std::snprintf(tmp, sizeof tmp, fmt, v);
  buf.append(tmp, static_cast<std::size_t>(n));
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace

LoadedCorpus load_corpus(const fs::path& root, const CorpusSchema& schema) {
  if (!fs::is_directory(root)) throw LoadError({root.string() + ": not a directory"});

  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw LoadError({root.string() + ": no sessions found"});

  const std::string ann_prefix = "annotations_" + schema.dimension + "_";
  LoadedCorpus corpus;
  std::vector<std::string> issues;

  for (const auto& dir : dirs) {
    Session session;
    session.participant_id = dir.filename().string();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& f : files) {
      const std::string stem = f.stem().string();
      if (stem.rfind("features_", 0) == 0) {
        const std::string mod_name = stem.substr(9);
        Modality m;
        try {
          m = parse_modality(mod_name);
        } catch (const ConfigError&) {
          corpus.report.warnings.push_back(f.string() + ": unknown modality, skipped");
          continue;
        }
        if (auto s = load_features(f, issues)) session.streams.emplace(m, std::move(*s));
        ++corpus.report.files_read;
      } else if (stem.rfind(ann_prefix, 0) == 0) {
        if (auto a = load_annotation(f, stem.substr(ann_prefix.size()), issues)) {
          session.annotations.push_back(std::move(*a));
        }
        ++corpus.report.files_read;
      } else if (stem.rfind("annotations_", 0) == 0) {
        continue;  // other affect dimension
      } else {
        corpus.report.warnings.push_back(f.string() + ": unrecognised file, skipped");
      }
    }

    if (session.streams.empty()) issues.push_back(dir.string() + ": no feature files");
    if (session.annotations.empty()) {
      issues.push_back(dir.string() + ": no " + schema.dimension + " annotation files");
    }
    if (!session.annotations.empty()) {
      const auto& a0 = session.annotations.front();
      for (const auto& a : session.annotations) {
        if (a.values.size() != a0.values.size() || a.rate_hz != a0.rate_hz ||
            a.start_s != a0.start_s) {
          issues.push_back(dir.string() + ": annotator " + a.annotator_id +
                           " trace differs in length, rate or start from " + a0.annotator_id);
        }
      }
    }
    corpus.sessions.push_back(std::move(session));
  }

  if (!issues.empty()) throw LoadError(std::move(issues));
  return corpus;
}

void write_corpus(const fs::path& root, const std::vector<Session>& sessions,
                  const CorpusSchema& schema) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root)) throw ConfigError("cannot create " + root.string());

  for (const auto& s : sessions) {
    s.validate();
    const fs::path dir = root / s.participant_id;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create " + dir.string());

    for (const auto& [m, stream] : s.streams) {
      std::string buf = "time_s";
      for (std::size_t c = 0; c < stream.frames.cols(); ++c) buf += ",f" + std::to_string(c);
      buf += '\n';
      for (std::size_t r = 0; r < stream.frames.rows(); ++r) {
        write_number(buf, stream.times[r], "%.10g");
        for (double v : stream.frames.row(r)) {
          buf += ',';
          write_number(buf, v, "%.9g");
        }
        buf += '\n';
      }
      write_file(dir / ("features_" + std::string(to_string(m)) + ".csv"), buf);
    }
    for (const auto& a : s.annotations) {
      std::string buf = "time_s,value\n";
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        write_number(buf, a.time_of(i), "%.10g");
        buf += ',';
        write_number(buf, a.values[i], "%.9g");
        buf += '\n';
      }
      write_file(dir / ("annotations_" + schema.dimension + "_" + a.annotator_id + ".csv"), buf);
    }
  }
}

}  // namespace affectcl::corpus
