// SPDX-License-Identifier: Apache-2.0

#include "qoe/workbench/manifest.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qoe/error.hpp"

namespace qoe::workbench {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

template <typename Fn>
void for_each_json_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read manifest " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::parse_error, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
}

}  // namespace

std::vector<SourceRecord> read_source_manifest(const fs::path& path) {
  std::vector<SourceRecord> out;
  for_each_json_line(path, [&](const nlohmann::json& j) {
    SourceRecord r{j.at("source_id").get<std::string>(), j.at("sidecar").get<std::string>()};
    if (r.sidecar.is_relative()) r.sidecar = path.parent_path() / r.sidecar;
    out.push_back(std::move(r));
  });
  return out;
}

fs::path CorpusManifest::resolve(const fs::path& p) const { return p.is_absolute() ? p : directory / p; }

const ManifestEntry* CorpusManifest::find(const std::string& video_id) const {
  for (const auto& e : entries) {
    if (e.video_id == video_id) return &e;
  }
  return nullptr;
}

void write_manifest(std::ostream& out, const CorpusManifest& manifest) {
  for (const auto& e : manifest.entries) {
    ordered_json j;
    j["video_id"] = e.video_id;
    j["source_id"] = e.source_id;
    j["resolution"] = e.resolution.str();
    j["framerate"] = e.framerate.str();
    j["crf"] = e.crf;
    j["recipe"] = e.recipe.generic_string();
    j["sidecar"] = e.sidecar.generic_string();
    j["schedule"] = e.schedule.generic_string();
    j["batch"] = e.batch ? ordered_json(to_string(*e.batch)) : ordered_json(nullptr);
    out << j.dump() << '\n';
  }
}

void save_manifest(const fs::path& path, const CorpusManifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  write_manifest(out, manifest);
}

CorpusManifest load_manifest(const fs::path& path) {
  CorpusManifest m;
  m.directory = path.parent_path();
  for_each_json_line(path, [&](const nlohmann::json& j) {
    ManifestEntry e;
    e.video_id = j.at("video_id").get<std::string>();
    e.source_id = j.at("source_id").get<std::string>();
    e.resolution = Resolution::parse(j.at("resolution").get<std::string>());
    e.framerate = Rational::parse(j.at("framerate").get<std::string>());
    e.crf = j.at("crf").get<int>();
    e.recipe = j.at("recipe").get<std::string>();
    e.sidecar = j.at("sidecar").get<std::string>();
    e.schedule = j.value("schedule", std::string{});
    if (j.contains("batch") && !j["batch"].is_null()) e.batch = parse_batch(j["batch"].get<std::string>());
    m.entries.push_back(std::move(e));
  });
  return m;
}

void validate_manifest(const CorpusManifest& manifest, bool require_schedules) {
  std::set<std::string> ids;
  for (const auto& e : manifest.entries) {
    if (!ids.insert(e.video_id).second) fail(ErrorKind::invalid_argument, "duplicate video_id " + e.video_id);
    auto need = [&](const fs::path& p, const char* what) {
      if (p.empty() || !fs::exists(manifest.resolve(p))) {
        fail(ErrorKind::invalid_argument,
             fmt::format("{}: {} file '{}' is missing", e.video_id, what, manifest.resolve(p).string()));
      }
    };
    need(e.recipe, "recipe");
    need(e.sidecar, "sidecar");
    if (require_schedules) need(e.schedule, "schedule");
  }
}

std::string framerate_label(const Rational& framerate) {
  if (framerate.den() == 1) return std::to_string(framerate.num());
  return fmt::format("{:.3f}", framerate.to_double());
}

}  // namespace qoe::workbench
