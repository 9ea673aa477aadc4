#pragma once

#include <filesystem>

#include <json.hpp>

#include "pragmarank/model/model.hpp"

namespace prk {

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

// Versioned JSON: model config, every parameter (name, shape, flat values),
// and free-form metadata (train config, best val loss, epoch).
nlohmann::json checkpoint_to_json(RankModel& model, const nlohmann::json& meta);
void save_checkpoint(const std::filesystem::path& path, RankModel& model,
                     const nlohmann::json& meta);

// Rebuilds the model and overwrites its parameters bit-exactly.
RankModel load_checkpoint(const std::filesystem::path& path, nlohmann::json* meta_out = nullptr);
RankModel checkpoint_from_json(const nlohmann::json& j, nlohmann::json* meta_out = nullptr);

}  // namespace prk
