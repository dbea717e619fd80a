// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qoe/criteria.hpp"

namespace qoe {

nlohmann::ordered_json to_json(const LogisticFit& fit);
nlohmann::ordered_json to_json(const CorrelationReport& report);
nlohmann::ordered_json to_json(const AucReport& report);
nlohmann::ordered_json to_json(const TaskComparison& comparison);
nlohmann::ordered_json to_json(const ModelComparison& comparison);
nlohmann::ordered_json to_json(const EvaluationReport& report);

/// Per-video predictor scores. Accepts a `video_id,score` file, or any CSV whose
/// first two columns are `video_id,mos` (so a MOS table can stand in for a model).
std::vector<std::pair<std::string, double>> read_scores(std::istream& in);
std::vector<std::pair<std::string, double>> load_scores(const std::filesystem::path& path);

}  // namespace qoe
