#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pragmarank/design/graph.hpp"

namespace prk {

inline constexpr int kSchemaVersion = 1;

nlohmann::json template_to_json(const KernelTemplate& t);
KernelTemplate template_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const PragmaConfig& c);
PragmaConfig config_from_json(const nlohmann::json& j);

// Helpers shared by every artifact reader/writer.
nlohmann::json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void check_schema_version(const nlohmann::json& j, const std::string& what);

}  // namespace prk
