// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "qoe/distortion.hpp"

namespace qoe {

// Recipe document:
//   {"mode_id": "B3", "stalls": [{"onset_s": 2.5, "duration_s": 1.0, "category": "short"}, ...],
//    "ar": 1.25, "crf": 22, "seed": 17, "source_id": "...", "batch": "1080p_batch2"}
// "batch" and "crf" are null for clean videos / when unset.
nlohmann::json recipe_to_json(const DistortionRecipe& recipe);
DistortionRecipe recipe_from_json(const nlohmann::json& doc);

void save_recipe(const std::filesystem::path& path, const DistortionRecipe& recipe);
DistortionRecipe load_recipe(const std::filesystem::path& path);

}  // namespace qoe
