#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "affectcl/evaluation/experiment.hpp"

namespace affectcl::evaluation {

/// Key of one grid cell: "<method>|w<length>|<modality>".
std::string cell_key(const ExperimentResult& r);
std::string cell_key(std::string_view method, double window_length_s, std::string_view modality);

nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const ExperimentResult& r);
ExperimentResult result_from_json(const nlohmann::json& j);
Summary summary_from_json(const nlohmann::json& j);

/// Writes via a temporary file and rename so readers never see partial files.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace affectcl::evaluation
