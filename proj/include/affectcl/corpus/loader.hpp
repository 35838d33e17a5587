#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "affectcl/corpus/types.hpp"

namespace affectcl::corpus {

// On-disk layout, one directory per participant:
//   <root>/<participant>/features_<modality>.csv              time_s,f0,f1,...
//   <root>/<participant>/annotations_<dimension>_<annotator>.csv  time_s,value

struct CorpusSchema {
  std::string dimension = "arousal";
};

struct LoadReport {
  std::size_t files_read = 0;
  std::vector<std::string> warnings;
};

struct LoadedCorpus {
  std::vector<Session> sessions;  // sorted by participant id
  LoadReport report;
};

/// Every problem found is itemised in the thrown LoadError.
LoadedCorpus load_corpus(const std::filesystem::path& root, const CorpusSchema& schema = {});

void write_corpus(const std::filesystem::path& root, const std::vector<Session>& sessions,
                  const CorpusSchema& schema = {});

}  // namespace affectcl::corpus
