// SPDX-License-Identifier: Apache-2.0

// qoe-forge: corpus generation, schedule restructuring, subjective scoring and
// model evaluation from the command line.
//
// Exit codes: 0 success, 2 bad input, 3 degenerate computation.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qoe/error.hpp"
#include "qoe/workbench/commands.hpp"
#include "qoe/workbench/config.hpp"
#include "qoe/workbench/manifest.hpp"
#include "qoe/workbench/server.hpp"
#include "qoe/workbench/session.hpp"

namespace fs = std::filesystem;
using namespace qoe;
using namespace qoe::workbench;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

Config file_config(const std::optional<fs::path>& path) { return path ? load_config(*path) : Config{}; }

std::uint64_t require_seed(const Config& cfg) {
  if (!cfg.seed) fail(ErrorKind::invalid_argument, "a seed is required (--seed or `seed =` in the config)");
  return *cfg.seed;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("qoe-forge"));
  spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e %l %v");

  CLI::App app{"qoe-forge: live-streaming QoE corpus and evaluation toolkit"};
  app.require_subcommand(1);

  std::optional<fs::path> config_path;
  std::optional<fs::path> manifest;
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<int> port;
  std::optional<fs::path> ratings;
  std::optional<fs::path> mos;
  std::optional<fs::path> frames;
  std::optional<double> alpha;
  std::vector<fs::path> scores;
  std::string host = "127.0.0.1";

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file; flags override it")->check(CLI::ExistingFile);
  };

  auto* distort = app.add_subcommand("distort", "Plan the corpus, draw recipes and write distorted PTS sidecars");
  distort->add_option("--manifest", manifest, "source manifest (JSON Lines: source_id, sidecar)")->required();
  distort->add_option("--out", out, "output directory")->required();
  distort->add_option("--seed", seed, "run seed");
  distort->add_option("--workers", workers, "worker threads (0 = all cores)");
  add_config(distort);

  auto* restructure = app.add_subcommand("restructure", "Write render schedules for a corpus manifest");
  restructure->add_option("--manifest", manifest, "corpus manifest written by distort")->required();
  restructure->add_option("--workers", workers, "worker threads (0 = all cores)");
  add_config(restructure);

  auto* mos_cmd = app.add_subcommand("mos", "Screen subjects and compute MOS");
  mos_cmd->add_option("--ratings", ratings, "ratings CSV")->required();
  mos_cmd->add_option("--out", out, "MOS CSV to write")->required();
  add_config(mos_cmd);

  auto* evaluate = app.add_subcommand("evaluate", "Correlation and pairwise AUC report for predictor scores");
  evaluate->add_option("--scores", scores, "predictor scores CSV (video_id,score); repeat for several models")
      ->required();
  evaluate->add_option("--ratings", ratings, "ratings CSV")->required();
  evaluate->add_option("--out", out, "report JSON to write")->required();
  evaluate->add_option("--alpha", alpha, "significance level (default 0.05)");
  add_config(evaluate);

  auto* summarize = app.add_subcommand("summarize", "MOS aggregates per corpus factor");
  summarize->add_option("--mos", mos, "MOS CSV")->required();
  summarize->add_option("--manifest", manifest, "corpus manifest")->required();
  summarize->add_option("--out", out, "aggregate CSV to write")->required();
  add_config(summarize);

  auto* serve_cmd = app.add_subcommand("serve", "Run the rating-session service");
  serve_cmd->add_option("--manifest", manifest, "corpus manifest with schedules")->required();
  serve_cmd->add_option("--out", out, "ratings CSV to append to")->required();
  serve_cmd->add_option("--port", port, "TCP port (default 8080)");
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--frames", frames, "frame image root");
  serve_cmd->add_option("--seed", seed, "playlist seed");
  add_config(serve_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    Config flags;
    flags.seed = seed;
    flags.workers = workers;
    flags.port = port;
    flags.alpha = alpha;
    if (frames) flags.frames_root = *frames;
    const Config cfg = merge(file_config(config_path), flags);

    if (distort->parsed()) {
      const auto summary = run_distort(DistortOptions{*manifest, *out, require_seed(cfg), cfg});
      fmt::print("{} videos ({} stalled, {} clean) -> {}\n", summary.entries, summary.stalled, summary.clean,
                 summary.manifest.string());
    } else if (restructure->parsed()) {
      fmt::print("{} schedules written\n", run_restructure(*manifest, cfg.workers.value_or(0)));
    } else if (mos_cmd->parsed()) {
      const auto s = run_mos(*ratings, *out);
      fmt::print("{} subjects, {} rejected, {} videos -> {}\n", s.subjects, s.rejected, s.videos, out->string());
    } else if (evaluate->parsed()) {
      run_evaluate(EvaluateOptions{scores, *ratings, *out, cfg.alpha.value_or(0.05)});
      fmt::print("report -> {}\n", out->string());
    } else if (summarize->parsed()) {
      run_summarize(*mos, *manifest, *out);
      fmt::print("aggregates -> {}\n", out->string());
    } else if (serve_cmd->parsed()) {
      SessionService service(load_manifest(*manifest), ServiceOptions{*out, cfg.frames_root, cfg.seed.value_or(0)});
      serve(service, host, cfg.port.value_or(8080));
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.kind()), e.what());
    return is_degenerate(e.kind()) ? kExitDegenerate : kExitInput;
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("parse-error: {}", e.what());
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("io-error: {}", e.what());
    return kExitInput;
  }
  return 0;
}
