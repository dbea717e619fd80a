// SPDX-License-Identifier: Apache-2.0

#include "qoe/report_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "csv.hpp"
#include "qoe/error.hpp"

namespace qoe {
namespace {

// JSON has no NaN; undefined statistics become null.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::ordered_json to_json(const LogisticFit& fit) {
  nlohmann::ordered_json j;
  j["family"] = "xi1 * (0.5 - 1 / (1 + exp(xi2 * (p - xi3)))) + xi4 * p + xi5";
  j["xi"] = nlohmann::ordered_json::array();
  for (double x : fit.params.xi) j["xi"].push_back(number(x));
  const auto& d = fit.diagnostics;
  j["diagnostics"] = {{"iterations", d.iterations},         {"starts", d.starts},
                      {"residual_norm", number(d.residual_norm)}, {"gradient_norm", number(d.gradient_norm)},
                      {"converged", d.converged},           {"stop_reason", d.stop_reason}};
  return j;
}

nlohmann::ordered_json to_json(const CorrelationReport& r) {
  nlohmann::ordered_json j;
  j["plcc"] = number(r.plcc);
  j["srcc"] = number(r.srcc);
  j["krcc"] = number(r.krcc);
  j["rmse"] = number(r.rmse);
  j["samples"] = r.samples;
  j["rank_correlations_on"] = "raw predictions";
  j["krcc_variant"] = "tau-b";
  j["mapping"] = to_json(r.fit);
  return j;
}

nlohmann::ordered_json to_json(const AucReport& r) {
  return {{"auc_different_vs_similar", number(r.auc_different_vs_similar)},
          {"auc_better_vs_worse", number(r.auc_better_vs_worse)},
          {"different_pairs", r.different_pairs},
          {"similar_pairs", r.similar_pairs}};
}

nlohmann::ordered_json to_json(const TaskComparison& c) {
  nlohmann::ordered_json j;
  j["task"] = c.task;
  j["aucs"] = nlohmann::ordered_json::array();
  for (double a : c.aucs) j["aucs"].push_back(number(a));
  j["matrix"] = nlohmann::ordered_json::array();
  for (const auto& row : c.matrix) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      r.push_back({{"order", to_string(cell.order)}, {"z", number(cell.z)}, {"p_value", number(cell.p_value)}});
    }
    j["matrix"].push_back(std::move(r));
  }
  return j;
}

nlohmann::ordered_json to_json(const ModelComparison& c) {
  nlohmann::ordered_json j;
  j["models"] = c.models;
  j["test"] = c.test;
  j["alpha"] = c.alpha;
  j["different_vs_similar"] = to_json(c.different_vs_similar);
  j["better_vs_worse"] = to_json(c.better_vs_worse);
  return j;
}

nlohmann::ordered_json to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["video_count"] = r.video_count;
  j["correlations"] = to_json(r.correlations);
  j["auc"] = to_json(r.auc);
  j["pair_test"] = r.pair_test;
  j["alpha"] = r.alpha;
  j["mos_rescaling"] = r.mos_rescaling;
  return j;
}

std::vector<std::pair<std::string, double>> read_scores(std::istream& in) {
  std::string line;
  if (!csv::next_line(in, line)) fail(ErrorKind::parse_error, "empty scores file");
  const auto header = csv::split(line);
  if (header.size() < 2 || header[0] != "video_id" || (header[1] != "score" && header[1] != "mos")) {
    fail(ErrorKind::parse_error, "scores file must start with video_id,score or video_id,mos, got '" + line + "'");
  }
  std::vector<std::pair<std::string, double>> out;
  std::set<std::string> seen;
  while (csv::next_line(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != header.size()) fail(ErrorKind::parse_error, fmt::format("scores row '{}' has {} fields", line, f.size()));
    if (!seen.insert(f[0]).second) fail(ErrorKind::parse_error, "video " + f[0] + " scored twice");
    out.emplace_back(f[0], csv::parse_double(f[1], "score"));
  }
  return out;
}

std::vector<std::pair<std::string, double>> load_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
  return read_scores(in);
}

}  // namespace qoe
