// SPDX-License-Identifier: Apache-2.0

// Drives the qoe-forge binary as a subprocess and checks outputs and exit codes.

#include <cstdlib>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "qoe/ratings.hpp"
#include "qoe/subjective.hpp"
#include "qoe/workbench/manifest.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace qoe;
using qoe::testing::slurp;
using qoe::testing::spit;
using qoe::testing::TempDir;

namespace {

const fs::path kGolden = QOE_GOLDEN_DIR;

int forge(const std::string& args) {
  const std::string cmd = fmt::format("\"{}\" {} >/dev/null 2>&1", QOE_FORGE, args);
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// Exit code plus everything the command wrote to stderr.
std::pair<int, std::string> forge_stderr(const std::string& args, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" {} >/dev/null 2>\"{}\"", QOE_FORGE, args, log.string());
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Integer 1..5 ratings around a per-video quality that increases with the index.
void write_ratings(const fs::path& path, const std::vector<std::string>& videos, int subjects) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::ofstream out(path);
  write_rating_header(out);
  for (int s = 0; s < subjects; ++s) {
    for (std::size_t v = 0; v < videos.size(); ++v) {
      const double quality = 1.0 + 4.0 * static_cast<double>(v) / static_cast<double>(videos.size());
      const double score = std::clamp(std::round(quality + noise(rng)), 1.0, 5.0);
      write_rating_row(out, RatingRow{fmt::format("s{}", s), videos[v], score, ""});
    }
  }
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    tmp = new TempDir("cli");
    sources = qoe::testing::write_sources(tmp->path());
    ASSERT_EQ(forge(fmt::format("distort --manifest {} --out {} --seed 42 --workers 4", q(sources), q(*tmp / "a"))),
              0);
  }
  static void TearDownTestSuite() {
    delete tmp;
    tmp = nullptr;
  }

  static TempDir* tmp;
  static fs::path sources;
};
TempDir* Cli::tmp = nullptr;
fs::path Cli::sources;

TEST_F(Cli, DistortBuildsTheFullCorpus) {
  const auto m = workbench::load_manifest(*tmp / "a" / "manifest.jsonl");
  EXPECT_EQ(m.entries.size(), 1155u);
  const auto stalled = std::count_if(m.entries.begin(), m.entries.end(), [](const auto& e) { return e.batch; });
  EXPECT_EQ(stalled, 945);
  workbench::validate_manifest(m, false);
}

TEST_F(Cli, DistortIsReproducible) {
  ASSERT_EQ(forge(fmt::format("distort --manifest {} --out {} --seed 42 --workers 1", q(sources), q(*tmp / "b"))), 0);
  std::size_t compared = 0;
  for (const auto& f : fs::directory_iterator(*tmp / "a")) {
    ASSERT_EQ(slurp(f.path()), slurp(*tmp / "b" / f.path().filename())) << f.path();
    ++compared;
  }
  EXPECT_GT(compared, 2000u);

  ASSERT_EQ(forge(fmt::format("distort --manifest {} --out {} --seed 43", q(sources), q(*tmp / "c"))), 0);
  // The plan does not depend on the seed; the drawn recipes do.
  EXPECT_EQ(slurp(*tmp / "a" / "manifest.jsonl"), slurp(*tmp / "c" / "manifest.jsonl"));
  EXPECT_NE(slurp(*tmp / "a" / "S01_crf15_b1_m01A1.recipe.json"), slurp(*tmp / "c" / "S01_crf15_b1_m01A1.recipe.json"));
}

TEST_F(Cli, SeedFromConfig) {
  spit(*tmp / "run.conf", "seed = 42\nworkers = 2\n");
  ASSERT_EQ(forge(fmt::format("distort --manifest {} --out {} --config {}", q(sources), q(*tmp / "d"),
                              q(*tmp / "run.conf"))),
            0);
  EXPECT_EQ(slurp(*tmp / "a" / "manifest.jsonl"), slurp(*tmp / "d" / "manifest.jsonl"));
}

TEST_F(Cli, RestructureAndSummarize) {
  ASSERT_EQ(forge(fmt::format("restructure --manifest {}", q(*tmp / "a" / "manifest.jsonl"))), 0);
  const auto m = workbench::load_manifest(*tmp / "a" / "manifest.jsonl");
  workbench::validate_manifest(m, true);

  std::vector<std::string> ids;
  for (const auto& e : m.entries) ids.push_back(e.video_id);
  write_ratings(*tmp / "corpus_ratings.csv", ids, 4);
  ASSERT_EQ(forge(fmt::format("mos --ratings {} --out {}", q(*tmp / "corpus_ratings.csv"), q(*tmp / "corpus_mos.csv"))),
            0);
  ASSERT_EQ(forge(fmt::format("summarize --mos {} --manifest {} --out {}", q(*tmp / "corpus_mos.csv"),
                              q(*tmp / "a" / "manifest.jsonl"), q(*tmp / "factors.csv"))),
            0);
  const std::string csv = slurp(*tmp / "factors.csv");
  EXPECT_EQ(csv.rfind("factor,group,count,mean,hist_1_2,hist_2_3,hist_3_4,hist_4_5\n", 0), 0u);
  EXPECT_NE(csv.find("\nresolution,1920x1080,"), std::string::npos);
  EXPECT_NE(csv.find("\ncrf,37,231,"), std::string::npos);
}

TEST(CliStandalone, EmptySourceManifestIsNotAnError) {
  TempDir tmp("cli-empty");
  spit(tmp / "sources.jsonl", "");
  ASSERT_EQ(forge(fmt::format("distort --manifest {} --out {} --seed 1", q(tmp / "sources.jsonl"), q(tmp / "out"))),
            0);
  EXPECT_EQ(line_count(tmp / "out" / "manifest.jsonl"), 0u);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& f : fs::directory_iterator(tmp / "out")) ++files;
  EXPECT_EQ(files, 1u);
}

TEST(CliStandalone, InputErrorsExitTwo) {
  TempDir tmp("cli-errors");
  spit(tmp / "sources.jsonl", R"({"source_id":"X","sidecar":"missing.csv"})"
                              "\n");
  const auto [code, err] =
      forge_stderr(fmt::format("distort --manifest {} --out {} --seed 1", q(tmp / "sources.jsonl"), q(tmp / "o")),
                   tmp / "err.txt");
  EXPECT_EQ(code, 2);
  EXPECT_NE(err.find("source X"), std::string::npos) << err;
  EXPECT_EQ(forge(fmt::format("distort --manifest {} --out {}", q(tmp / "sources.jsonl"), q(tmp / "o"))), 2);  // no seed
  EXPECT_EQ(forge("distort --bogus"), 2);
  EXPECT_EQ(forge(""), 2);
  EXPECT_EQ(forge("--help"), 0);

  spit(tmp / "empty_ratings.csv", "subject_id,video_id,score,timestamp_iso8601\n");
  EXPECT_EQ(forge(fmt::format("mos --ratings {} --out {}", q(tmp / "empty_ratings.csv"), q(tmp / "mos.csv"))), 2);
  EXPECT_FALSE(fs::exists(tmp / "mos.csv"));
}

TEST(CliStandalone, RestructureMatchesGolden) {
  TempDir tmp("cli-golden");
  fs::copy_file(kGolden / "stall_n10_ar2.timing.csv", tmp / "g.timing.csv");
  spit(tmp / "g.recipe.json", "{}\n");
  spit(tmp / "manifest.jsonl",
       R"({"video_id":"g","source_id":"s","resolution":"1920x1080","framerate":"25","crf":22,)"
       R"("recipe":"g.recipe.json","sidecar":"g.timing.csv","schedule":"g.schedule.csv","batch":"1080p_batch1"})"
       "\n");
  ASSERT_EQ(forge(fmt::format("restructure --manifest {}", q(tmp / "manifest.jsonl"))), 0);
  EXPECT_EQ(slurp(tmp / "g.schedule.csv"), slurp(kGolden / "stall_n10_ar2.schedule.csv"));
}

TEST(CliStandalone, MosThenEvaluate) {
  TempDir tmp("cli-eval");
  std::vector<std::string> ids;
  for (int v = 1; v <= 30; ++v) ids.push_back(fmt::format("V{:02}", v));
  write_ratings(tmp / "ratings.csv", ids, 12);
  ASSERT_EQ(forge(fmt::format("mos --ratings {} --out {}", q(tmp / "ratings.csv"), q(tmp / "mos.csv"))), 0);
  EXPECT_TRUE(fs::exists(tmp / "mos.screening.csv"));
  EXPECT_EQ(load_mos_csv(tmp / "mos.csv").rows.size(), 30u);

  // MOS as its own predictor, plus a reversed model.
  std::string reversed = "video_id,score\n";
  for (int v = 1; v <= 30; ++v) reversed += fmt::format("V{:02},{}\n", v, 31 - v);
  spit(tmp / "reversed.csv", reversed);
  ASSERT_EQ(forge(fmt::format("evaluate --scores {} --scores {} --ratings {} --out {} --alpha 0.05",
                              q(tmp / "mos.csv"), q(tmp / "reversed.csv"), q(tmp / "ratings.csv"),
                              q(tmp / "report.json"))),
            0);
  const auto report = nlohmann::json::parse(slurp(tmp / "report.json"));
  EXPECT_EQ(report["video_count"], 30);
  ASSERT_EQ(report["reports"].size(), 2u);
  EXPECT_DOUBLE_EQ(report["reports"][0]["correlations"]["srcc"].get<double>(), 1.0);
  EXPECT_LT(report["reports"][0]["correlations"]["rmse"].get<double>(), 1e-6);
  EXPECT_LT(report["reports"][1]["correlations"]["srcc"].get<double>(), -0.9);
  EXPECT_FALSE(report["model_comparison"].is_null());

  // A constant predictor cannot be mapped: degenerate exit.
  std::string flat = "video_id,score\n";
  for (const auto& id : ids) flat += id + ",3\n";
  spit(tmp / "flat.csv", flat);
  EXPECT_EQ(forge(fmt::format("evaluate --scores {} --ratings {} --out {}", q(tmp / "flat.csv"),
                              q(tmp / "ratings.csv"), q(tmp / "flat.json"))),
            3);

  // Missing video in the scores file.
  spit(tmp / "short.csv", "video_id,score\nV01,1\n");
  EXPECT_EQ(forge(fmt::format("evaluate --scores {} --ratings {} --out {}", q(tmp / "short.csv"),
                              q(tmp / "ratings.csv"), q(tmp / "short.json"))),
            2);
}

}  // namespace
