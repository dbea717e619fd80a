// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qoe/error.hpp"
#include "qoe/ratings.hpp"
#include "qoe/workbench/commands.hpp"
#include "qoe/workbench/config.hpp"
#include "qoe/workbench/manifest.hpp"
#include "qoe/workbench/pool.hpp"
#include "qoe/workbench/server.hpp"
#include "qoe/workbench/session.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace qoe;
using namespace qoe::workbench;
using qoe::testing::TempDir;
using nlohmann::json;

namespace {

const fs::path kGolden = QOE_GOLDEN_DIR;

// ---- config ----------------------------------------------------------------

TEST(Config, ParsesKeysAndComments) {
  std::istringstream in(
      "# run settings\n"
      "seed = 42\n"
      "workers=4\n"
      "crfs = 15, 22,27\n"
      "alpha = 0.01   # tighter\n"
      "frames_root = frames\n"
      "encoder_command = enc {input_frames} {crf}\n"
      "\n");
  const Config c = parse_config(in, "/data/run");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.workers, 4u);
  EXPECT_EQ(c.crfs, (std::vector<int>{15, 22, 27}));
  EXPECT_DOUBLE_EQ(*c.alpha, 0.01);
  EXPECT_EQ(c.frames_root, fs::path("/data/run/frames"));
  EXPECT_EQ(c.encoder_command, "enc {input_frames} {crf}");
  EXPECT_FALSE(c.port);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  std::istringstream unknown("sed = 1\n");
  EXPECT_THROW(parse_config(unknown), Error);
  std::istringstream bad("seed = many\n");
  EXPECT_THROW(parse_config(bad), Error);
  std::istringstream noeq("seed 1\n");
  EXPECT_THROW(parse_config(noeq), Error);
}

TEST(Config, FlagsOverrideFile) {
  Config file;
  file.seed = 1;
  file.alpha = 0.1;
  Config flags;
  flags.seed = 7;
  const Config c = merge(file, flags);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_DOUBLE_EQ(*c.alpha, 0.1);
}

TEST(Config, TemplateExpansion) {
  EXPECT_EQ(expand_template("a {x} b {y}{x}", {{"x", "1"}, {"y", "2"}}), "a 1 b 21");
  EXPECT_THROW(expand_template("{nope}", {{"x", "1"}}), Error);
}

// ---- pool ------------------------------------------------------------------

TEST(Pool, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 8, [&](std::size_t k) { hits[k].fetch_add(1); });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Pool, RethrowsFailure) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t k) {
                              if (k == 37) fail(ErrorKind::invalid_argument, "boom");
                            }),
               Error);
}

// ---- manifest --------------------------------------------------------------

ManifestEntry golden_entry(const std::string& id) {
  ManifestEntry e;
  e.video_id = id;
  e.source_id = "SRC";
  e.resolution = {1920, 1080};
  e.framerate = Rational(25);
  e.crf = 22;
  e.recipe = id + ".recipe.json";
  e.sidecar = id + ".timing.csv";
  e.schedule = id + ".schedule.csv";
  e.batch = Batch::hd1080_first;
  return e;
}

// Manifest of `n` copies of the hand-built stall golden, schedules written.
CorpusManifest golden_corpus(const fs::path& dir, int n) {
  CorpusManifest m;
  m.directory = dir;
  for (int i = 1; i <= n; ++i) {
    auto e = golden_entry(fmt::format("V{}", i));
    fs::copy_file(kGolden / "stall_n10_ar2.timing.csv", dir / e.sidecar);
    qoe::testing::spit(dir / e.recipe, "{}\n");
    m.entries.push_back(e);
  }
  save_manifest(dir / "manifest.jsonl", m);
  run_restructure(dir / "manifest.jsonl", 2);
  return load_manifest(dir / "manifest.jsonl");
}

TEST(Manifest, RoundTrip) {
  TempDir tmp("manifest");
  CorpusManifest m;
  m.directory = tmp.path();
  m.entries = {golden_entry("A"), golden_entry("B")};
  m.entries[1].batch.reset();
  m.entries[1].framerate = Rational(30000, 1001);
  save_manifest(tmp / "m.jsonl", m);
  const auto back = load_manifest(tmp / "m.jsonl");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[0].video_id, "A");
  EXPECT_EQ(back.entries[0].batch, Batch::hd1080_first);
  EXPECT_FALSE(back.entries[1].batch);
  EXPECT_EQ(back.entries[1].framerate, Rational(30000, 1001));
  EXPECT_EQ(back.resolve("x.csv"), tmp.path() / "x.csv");
  EXPECT_EQ(framerate_label(Rational(25)), "25");
}

TEST(Manifest, ValidationNamesOffender) {
  TempDir tmp("manifest");
  CorpusManifest m;
  m.directory = tmp.path();
  m.entries = {golden_entry("A")};
  try {
    validate_manifest(m, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("A"), std::string::npos);
  }
  m.entries.push_back(golden_entry("A"));
  EXPECT_THROW(validate_manifest(m, false), Error);
}

TEST(Manifest, MalformedLineIsParseError) {
  TempDir tmp("manifest");
  qoe::testing::spit(tmp / "m.jsonl", "{\"video_id\": \n");
  try {
    load_manifest(tmp / "m.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse_error);
  }
}

// ---- rating service --------------------------------------------------------

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    manifest = golden_corpus(tmp.path(), 4);
    fs::create_directories(tmp / "frames" / "SRC");
    for (int k = 1; k <= 10; ++k) qoe::testing::spit(tmp / "frames" / "SRC" / fmt::format("{:06}.png", k), "PNG");
  }
  SessionService make(std::uint64_t seed = 9) {
    return SessionService(manifest, ServiceOptions{tmp / "ratings.csv", tmp / "frames", seed});
  }
  static std::string rating(const std::string& sid, const std::string& vid, const std::string& score) {
    return fmt::format(R"({{"session_id":"{}","video_id":"{}","score":{}}})", sid, vid, score);
  }

  TempDir tmp{"service"};
  CorpusManifest manifest;
};

TEST_F(ServiceTest, PlaylistIsDeterministicPerSubject) {
  auto a = make();
  auto b = make();
  const auto ra = a.open_session("alice");
  const auto rb = b.open_session("alice");
  ASSERT_EQ(ra.status, 200);
  EXPECT_EQ(ra.body, rb.body);
  EXPECT_EQ(a.open_session("alice").body, ra.body);  // reopening keeps the session
  auto pl = ra.body["playlist"].get<std::vector<std::string>>();
  std::sort(pl.begin(), pl.end());
  EXPECT_EQ(pl, (std::vector<std::string>{"V1", "V2", "V3", "V4"}));
  EXPECT_NE(a.open_session("bob").body["session_id"], ra.body["session_id"]);
  EXPECT_EQ(a.open_session("").status, 400);
  EXPECT_EQ(a.open_session("a,b").status, 400);
}

TEST_F(ServiceTest, ScheduleMatchesGolden) {
  auto s = make();
  const auto r = s.schedule("V1");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["entries"].size(), 11u);
  EXPECT_EQ(r.body["entries"][2]["flag"], "stall_repeat");
  EXPECT_EQ(r.body["entries"][2]["render_pts"], 80);
  EXPECT_EQ(r.body["timebase"]["denominator"], 1000);
  EXPECT_EQ(s.schedule("nope").status, 404);
}

TEST_F(ServiceTest, RatingRules) {
  auto s = make();
  const std::string sid = s.open_session("alice").body["session_id"];
  EXPECT_EQ(s.rate(rating(sid, "V1", "4")).status, 409);  // not played
  EXPECT_EQ(s.frame("V1", 5, sid).status, 200);
  EXPECT_EQ(s.rate(rating(sid, "V1", "4")).status, 409);  // only part of it
  const auto last = s.frame("V1", 10, sid);
  EXPECT_EQ(last.status, 200);
  EXPECT_EQ(last.content_type, "image/png");
  EXPECT_EQ(last.bytes, "PNG");
  EXPECT_EQ(s.frame("V1", 11, sid).status, 404);

  EXPECT_EQ(s.rate(rating(sid, "V1", "6")).status, 422);
  EXPECT_EQ(s.rate(rating(sid, "V1", "0")).status, 422);
  EXPECT_EQ(s.rate(rating(sid, "V1", "3.5")).status, 400);
  EXPECT_EQ(s.rate(rating(sid, "V1", "\"4\"")).status, 400);
  EXPECT_EQ(s.rate("not json").status, 400);
  EXPECT_EQ(s.rate(rating("ffff", "V1", "4")).status, 404);
  EXPECT_EQ(s.rate(rating(sid, "V9", "4")).status, 404);

  const auto ok = s.rate(rating(sid, "V1", "4"));
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(ok.body["accepted"], true);
  EXPECT_EQ(s.rate(rating(sid, "V1", "5")).status, 409);  // already rated
  EXPECT_EQ(s.stored_ratings(), 1u);
  EXPECT_EQ(s.session(sid)->state.at("V1"), ItemState::rated);

  const auto rows = load_rating_rows(tmp / "ratings.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].subject_id, "alice");
  EXPECT_EQ(rows[0].video_id, "V1");
  EXPECT_EQ(rows[0].score, 4.0);
  EXPECT_FALSE(rows[0].timestamp.empty());
}

TEST_F(ServiceTest, ConcurrentSessionsStoreEveryRating) {
  auto s = make();
  constexpr int kSubjects = 8;
  std::vector<std::jthread> threads;
  for (int i = 0; i < kSubjects; ++i) {
    threads.emplace_back([&, i] {
      const std::string sid = s.open_session(fmt::format("subj{}", i)).body["session_id"];
      for (const auto& v : {"V1", "V2", "V3", "V4"}) {
        s.frame(v, 10, sid);
        EXPECT_EQ(s.rate(rating(sid, v, std::to_string(1 + i % 5))).status, 200);
      }
    });
  }
  threads.clear();
  EXPECT_EQ(s.stored_ratings(), 4u * kSubjects);
  const auto m = RatingsMatrix::from_rows(load_rating_rows(tmp / "ratings.csv"));
  EXPECT_EQ(m.subject_count(), static_cast<std::size_t>(kSubjects));
  EXPECT_EQ(m.video_count(), 4u);
}

TEST_F(ServiceTest, RatingsFileAppendsAcrossRestarts) {
  {
    auto s = make();
    const std::string sid = s.open_session("a").body["session_id"];
    s.frame("V2", 10, sid);
    ASSERT_EQ(s.rate(rating(sid, "V2", "2")).status, 200);
  }
  {
    auto s = make();
    const std::string sid = s.open_session("b").body["session_id"];
    s.frame("V2", 10, sid);
    ASSERT_EQ(s.rate(rating(sid, "V2", "3")).status, 200);
  }
  EXPECT_EQ(load_rating_rows(tmp / "ratings.csv").size(), 2u);
}

TEST_F(ServiceTest, ServiceNeedsSchedules) {
  fs::remove(tmp / "V3.schedule.csv");
  EXPECT_THROW(make(), Error);
}

TEST_F(ServiceTest, HttpRoundTrip) {
  auto service = make();
  httplib::Server server;
  register_routes(server, service);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::jthread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto r = client.Get("/api/session?subject=carol");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  const auto session = json::parse(r->body);
  const std::string sid = session["session_id"];
  const std::string vid = session["playlist"][0];

  r = client.Get("/api/video/" + vid + "/schedule");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["entries"].size(), 11u);

  const std::string body = rating(sid, vid, "5");
  r = client.Post("/api/rating", body, "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 409);

  r = client.Get("/api/video/" + vid + "/frame/10?session=" + sid);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");

  r = client.Post("/api/rating", body, "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["accepted"], true);

  r = client.Get("/api/session");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  r = client.Get("/api/video/nope/schedule");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);

  server.stop();
}

}  // namespace
