// SPDX-License-Identifier: Apache-2.0

#include "qoe/recipe_io.hpp"

#include <fstream>

#include "qoe/error.hpp"

namespace qoe {

nlohmann::json recipe_to_json(const DistortionRecipe& recipe) {
  nlohmann::json stalls = nlohmann::json::array();
  for (const auto& s : recipe.stalls) {
    stalls.push_back({{"onset_s", s.onset_seconds}, {"duration_s", s.duration_seconds}, {"category", to_string(s.category)}});
  }
  nlohmann::json doc;
  doc["mode_id"] = recipe.mode_id;
  doc["stalls"] = std::move(stalls);
  doc["ar"] = recipe.acceleration_rate;
  doc["crf"] = recipe.crf ? nlohmann::json(*recipe.crf) : nlohmann::json(nullptr);
  doc["seed"] = recipe.seed;
  doc["source_id"] = recipe.source_id;
  doc["batch"] = recipe.batch ? nlohmann::json(to_string(*recipe.batch)) : nlohmann::json(nullptr);
  return doc;
}

DistortionRecipe recipe_from_json(const nlohmann::json& doc) {
  try {
    DistortionRecipe recipe;
    recipe.mode_id = doc.at("mode_id").get<std::string>();
    for (const auto& s : doc.at("stalls")) {
      recipe.stalls.push_back(StallEvent{s.at("onset_s").get<double>(), s.at("duration_s").get<double>(),
                                         parse_duration_category(s.at("category").get<std::string>())});
    }
    recipe.acceleration_rate = doc.at("ar").get<double>();
    if (doc.contains("crf") && !doc["crf"].is_null()) recipe.crf = doc["crf"].get<int>();
    recipe.seed = doc.value("seed", std::uint64_t{0});
    recipe.source_id = doc.value("source_id", std::string{});
    if (doc.contains("batch") && !doc["batch"].is_null()) recipe.batch = parse_batch(doc["batch"].get<std::string>());
    return recipe;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse_error, std::string("malformed recipe: ") + e.what());
  }
}

void save_recipe(const std::filesystem::path& path, const DistortionRecipe& recipe) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  out << recipe_to_json(recipe).dump(2) << '\n';
}

DistortionRecipe load_recipe(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
  try {
    return recipe_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::parse_error, path.string() + ": " + e.what());
  }
}

}  // namespace qoe
