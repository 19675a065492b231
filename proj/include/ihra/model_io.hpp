#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "ihra/predictor.hpp"
#include "ihra/training.hpp"

namespace ihra {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document: shapes, row-major parameter arrays and, when
/// given, the training hyperparameters.
nlohmann::json model_to_json(const PredictorModel& model,
                             const std::optional<TrainingOptions>& hyper = std::nullopt);

/// Inverse of model_to_json. Throws IoError on a malformed or
/// unsupported-version document.
PredictorModel model_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const PredictorModel& model,
                const std::optional<TrainingOptions>& hyper = std::nullopt);
PredictorModel load_model(const std::filesystem::path& path);

}  // namespace ihra
