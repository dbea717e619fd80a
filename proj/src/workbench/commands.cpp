// SPDX-License-Identifier: Apache-2.0

#include "qoe/workbench/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "qoe/criteria.hpp"
#include "qoe/error.hpp"
#include "qoe/ratings.hpp"
#include "qoe/recipe_io.hpp"
#include "qoe/report_io.hpp"
#include "qoe/restructure.hpp"
#include "qoe/sidecar.hpp"
#include "qoe/subjective.hpp"
#include "qoe/workbench/manifest.hpp"
#include "qoe/workbench/pool.hpp"

namespace qoe::workbench {
namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::size_t count_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) return 0;
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  out << text;
}

// Hands one corpus video to the external encoder and checks that it produced
// one output frame per source frame.
void run_encoder(const Config& config, const ManifestEntry& entry, std::size_t frame_count) {
  if (!config.frames_root) fail(ErrorKind::invalid_argument, "encoder_command needs frames_root in the config");
  const fs::path input = *config.frames_root / entry.source_id;
  const fs::path output = *config.frames_root / entry.video_id;
  fs::create_directories(output);
  const std::string command = expand_template(*config.encoder_command, {{"video_id", entry.video_id},
                                                                        {"source_id", entry.source_id},
                                                                        {"crf", std::to_string(entry.crf)},
                                                                        {"input_frames", shell_quote(input.string())},
                                                                        {"output_frames", shell_quote(output.string())}});
  const int status = std::system(command.c_str());
  if (status != 0) fail(ErrorKind::io_error, fmt::format("{}: encoder exited with status {}", entry.video_id, status));
  const std::size_t produced = count_files(output);
  if (produced != frame_count) {
    fail(ErrorKind::io_error,
         fmt::format("{}: encoder produced {} frames, expected {}", entry.video_id, produced, frame_count));
  }
}

RatingsMatrix load_ratings(const fs::path& path) {
  const auto rows = load_rating_rows(path);
  if (rows.empty()) fail(ErrorKind::invalid_argument, "ratings file " + path.string() + " holds no ratings");
  return RatingsMatrix::from_rows(rows);
}

}  // namespace

DistortSummary run_distort(const DistortOptions& options) {
  const auto records = read_source_manifest(options.sources);
  std::map<std::string, FrameTimeline> timelines;
  std::vector<SourceVideo> sources;
  for (const auto& r : records) {
    if (timelines.contains(r.source_id)) fail(ErrorKind::invalid_argument, "duplicate source_id " + r.source_id);
    if (!fs::exists(r.sidecar)) {
      fail(ErrorKind::invalid_argument,
           fmt::format("source {}: sidecar '{}' not found", r.source_id, r.sidecar.string()));
    }
    FrameTimeline t = load_sidecar(r.sidecar);
    require_valid(t);
    sources.push_back(SourceVideo{r.source_id, t.resolution, t.framerate});
    timelines.emplace(r.source_id, std::move(t));
  }

  const Config& cfg = options.config;
  const std::vector<int> crfs = cfg.crfs.value_or(paper_crf_set());
  const CorpusPlan plan = plan_corpus(sources, crfs, cfg.modes_per_video.value_or(kPaperModesPerVideo));

  fs::create_directories(options.out);
  CorpusManifest manifest;
  manifest.directory = options.out;
  manifest.entries.resize(plan.entries.size());

  parallel_for(plan.entries.size(), cfg.workers.value_or(0), [&](std::size_t k) {
    const CorpusEntry& c = plan.entries[k];
    const FrameTimeline& source = timelines.at(c.source_id);
    DistortionRecipe recipe;
    if (c.stalled()) {
      const ModeTemplate& mode = enumerate_stall_modes().at(static_cast<std::size_t>(c.mode_slot - 1));
      recipe = sample_recipe(mode, *c.batch, derive_seed(options.seed, c.video_id), duration_seconds(source));
    } else {
      recipe.seed = derive_seed(options.seed, c.video_id);
    }
    recipe.crf = c.crf;
    recipe.source_id = c.source_id;

    const SynthesisResult result = synthesize_output_pts(source, recipe);
    ManifestEntry& e = manifest.entries[k];
    e.video_id = c.video_id;
    e.source_id = c.source_id;
    e.resolution = c.resolution;
    e.framerate = c.framerate;
    e.crf = c.crf;
    e.batch = c.batch;
    e.recipe = c.video_id + ".recipe.json";
    e.sidecar = c.video_id + ".timing.csv";
    e.schedule = c.video_id + ".schedule.csv";
    save_recipe(options.out / e.recipe, recipe);
    save_sidecar(options.out / e.sidecar, result.timeline);
    if (cfg.encoder_command) run_encoder(cfg, e, source.frame_count());
  });

  DistortSummary summary;
  summary.entries = plan.total();
  summary.stalled = plan.stalled_count;
  summary.clean = plan.clean_count;
  summary.manifest = options.out / "manifest.jsonl";
  save_manifest(summary.manifest, manifest);
  spdlog::info("distort: {} sources -> {} videos ({} stalled, {} clean), seed {}", sources.size(), summary.entries,
               summary.stalled, summary.clean, options.seed);
  return summary;
}

std::size_t run_restructure(const fs::path& manifest_path, unsigned workers) {
  const CorpusManifest manifest = load_manifest(manifest_path);
  validate_manifest(manifest, false);
  parallel_for(manifest.entries.size(), workers, [&](std::size_t k) {
    const ManifestEntry& e = manifest.entries[k];
    if (e.schedule.empty()) fail(ErrorKind::invalid_argument, e.video_id + ": manifest entry has no schedule path");
    save_schedule(manifest.resolve(e.schedule), restructure(load_sidecar(manifest.resolve(e.sidecar))));
  });
  spdlog::info("restructure: {} schedules written", manifest.entries.size());
  return manifest.entries.size();
}

MosSummary run_mos(const fs::path& ratings, const fs::path& out) {
  const RatingsMatrix m = load_ratings(ratings);
  const MosPipelineResult result = screened_mos(m);
  save_mos_csv(out, result.table);

  std::string log = "subject_id,rated,above,below,rejected\n";
  for (const auto& s : result.rejection.log) {
    log += fmt::format("{},{},{},{},{}\n", s.subject_id, s.rated, s.above, s.below, s.rejected ? 1 : 0);
  }
  fs::path log_path = out;
  log_path.replace_filename(out.stem().string() + ".screening.csv");
  write_text(log_path, log);

  for (const auto& v : result.table.unrated_videos) spdlog::warn("mos: video {} has no retained rating", v);
  MosSummary summary{m.subject_count(), result.rejection.rejected_count(), result.table.rows.size()};
  spdlog::info("mos: {} subjects, {} rejected, {} videos", summary.subjects, summary.rejected, summary.videos);
  return summary;
}

void run_evaluate(const EvaluateOptions& options) {
  if (options.scores.empty()) fail(ErrorKind::invalid_argument, "evaluate needs at least one scores file");
  const MosPipelineResult screened = screened_mos(load_ratings(options.ratings));
  const MosTable& table = screened.table;

  std::vector<ModelScores> models;
  for (const auto& path : options.scores) {
    std::map<std::string, double> by_id;
    for (const auto& [id, score] : load_scores(path)) by_id.emplace(id, score);
    ModelScores model{path.stem().string(), {}};
    for (const auto& row : table.rows) {
      const auto it = by_id.find(row.video_id);
      if (it == by_id.end()) {
        fail(ErrorKind::invalid_argument, fmt::format("{}: no score for video {}", path.string(), row.video_id));
      }
      model.predictions.push_back(it->second);
    }
    models.push_back(std::move(model));
  }

  std::vector<double> mos;
  for (const auto& row : table.rows) mos.push_back(row.mos);
  const PairPartition partition = partition_pairs(video_stats(table), options.alpha);

  nlohmann::ordered_json doc;
  doc["video_count"] = table.rows.size();
  doc["subjects"] = screened.rejection.log.size();
  doc["rejected_subjects"] = nlohmann::ordered_json::array();
  for (const auto& s : screened.rejection.log) {
    if (s.rejected) doc["rejected_subjects"].push_back(s.subject_id);
  }
  doc["excluded_subjects"] = table.excluded_subjects;
  doc["mos_rescaling"] = table.rescaling;
  doc["pair_test"] = partition.test;
  doc["alpha"] = partition.alpha;
  doc["reports"] = nlohmann::ordered_json::array();
  for (const auto& model : models) {
    EvaluationReport r;
    r.model = model.name;
    r.video_count = table.rows.size();
    r.correlations = correlations(model.predictions, mos);
    r.auc = auc_analysis(with_predictions(partition, model.predictions));
    r.pair_test = partition.test;
    r.alpha = partition.alpha;
    r.mos_rescaling = table.rescaling;
    doc["reports"].push_back(to_json(r));
    spdlog::info("evaluate: {} srcc={:.4f} plcc={:.4f} auc_ds={:.4f} auc_bw={:.4f}", r.model, r.correlations.srcc,
                 r.correlations.plcc, r.auc.auc_different_vs_similar, r.auc.auc_better_vs_worse);
  }
  doc["model_comparison"] =
      models.size() >= 2 ? to_json(compare_models(partition, models, options.alpha)) : nlohmann::ordered_json(nullptr);
  write_text(options.out, doc.dump(2) + "\n");
}

void run_summarize(const fs::path& mos_path, const fs::path& manifest_path, const fs::path& out) {
  const MosTable mos = load_mos_csv(mos_path);
  const CorpusManifest manifest = load_manifest(manifest_path);
  std::vector<VideoFactors> factors;
  for (const auto& e : manifest.entries) {
    const DistortionRecipe recipe = load_recipe(manifest.resolve(e.recipe));
    VideoFactors f;
    f.video_id = e.video_id;
    f.resolution = e.resolution.str();
    f.framerate = framerate_label(e.framerate);
    f.crf = e.crf;
    f.stall_count = recipe.stalls.size();
    f.acceleration_rate = recipe.acceleration_rate;
    f.mode_id = recipe.mode_id;
    for (const auto& s : recipe.stalls) f.total_stall_seconds += s.duration_seconds;
    factors.push_back(std::move(f));
  }
  std::ofstream o(out, std::ios::binary | std::ios::trunc);
  if (!o) fail(ErrorKind::io_error, "cannot write " + out.string());
  write_factor_csv(o, factor_summary(mos, factors));
}

}  // namespace qoe::workbench
