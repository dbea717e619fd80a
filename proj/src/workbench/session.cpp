// SPDX-License-Identifier: Apache-2.0

#include "qoe/workbench/session.hpp"

#include <chrono>
#include <random>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qoe/error.hpp"
#include "qoe/ratings.hpp"
#include "qoe/sidecar.hpp"

namespace qoe::workbench {
namespace fs = std::filesystem;

namespace {

constexpr const char* kImageExtensions[] = {".png", ".jpg", ".jpeg", ".bmp"};

std::string content_type_for(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".bmp") return "image/bmp";
  return "image/jpeg";
}

std::vector<std::string> shuffled(std::vector<std::string> items, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    const auto j = std::min(i - 1, static_cast<std::size_t>(u * static_cast<double>(i)));
    std::swap(items[i - 1], items[j]);
  }
  return items;
}

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

FrameReply frame_error(int status, const std::string& reason) {
  return FrameReply{status, "application/json", nlohmann::json{{"error", reason}}.dump()};
}

}  // namespace

std::string to_string(ItemState state) {
  switch (state) {
    case ItemState::pending: return "pending";
    case ItemState::played: return "played";
    case ItemState::rated: break;
  }
  return "rated";
}

SessionService::SessionService(CorpusManifest manifest, ServiceOptions options)
    : manifest_(std::move(manifest)), options_(std::move(options)) {
  validate_manifest(manifest_, true);
  for (const auto& e : manifest_.entries) {
    Video v;
    v.entry = &e;
    v.schedule = load_schedule(manifest_.resolve(e.schedule));
    for (const auto& s : v.schedule.entries) v.last_frame = std::max(v.last_frame, s.source_frame_index);
    videos_.emplace(e.video_id, std::move(v));
    order_.push_back(e.video_id);
  }
  const bool fresh = !fs::exists(options_.ratings_out) || fs::file_size(options_.ratings_out) == 0;
  ratings_.open(options_.ratings_out, std::ios::binary | std::ios::app);
  if (!ratings_) fail(ErrorKind::io_error, "cannot open ratings file " + options_.ratings_out.string());
  if (fresh) {
    write_rating_header(ratings_);
    ratings_.flush();
  }
}

const SessionService::Video* SessionService::video(const std::string& id) const {
  const auto it = videos_.find(id);
  return it == videos_.end() ? nullptr : &it->second;
}

Reply SessionService::reject(int status, const std::string& reason) const {
  return Reply{status, {{"accepted", false}, {"reason", reason}}};
}

Reply SessionService::open_session(const std::string& subject_id) {
  if (subject_id.empty()) return Reply{400, {{"error", "missing subject"}}};
  if (subject_id.find_first_of(",\r\n") != std::string::npos) {
    return Reply{400, {{"error", "subject id may not contain commas or line breaks"}}};
  }
  std::lock_guard lock(mutex_);
  Session* s = nullptr;
  if (const auto it = by_subject_.find(subject_id); it != by_subject_.end()) {
    s = &sessions_.at(it->second);
  } else {
    Session fresh;
    fresh.subject_id = subject_id;
    fresh.playlist_seed = derive_seed(options_.seed, "playlist:" + subject_id);
    fresh.session_id = fmt::format("{:016x}", derive_seed(options_.seed, "session:" + subject_id));
    fresh.playlist = shuffled(order_, fresh.playlist_seed);
    for (const auto& id : fresh.playlist) fresh.state[id] = ItemState::pending;
    spdlog::info("session {} for subject {}: playlist seed {}", fresh.session_id, subject_id, fresh.playlist_seed);
    by_subject_[subject_id] = fresh.session_id;
    s = &(sessions_[fresh.session_id] = std::move(fresh));
  }
  return Reply{200, {{"session_id", s->session_id}, {"playlist", s->playlist}}};
}

Reply SessionService::schedule(const std::string& video_id) const {
  const Video* v = video(video_id);
  if (!v) return Reply{404, {{"error", "unknown video " + video_id}}};
  const auto& h = v->schedule.header;
  nlohmann::ordered_json body;
  body["video_id"] = video_id;
  body["framerate"] = h.framerate.to_double();
  body["resolution"] = {{"width", h.resolution.width}, {"height", h.resolution.height}};
  body["timebase"] = {{"numerator", h.timebase.numerator}, {"denominator", h.timebase.denominator}};
  body["nominal_duration"] = h.nominal_duration;
  body["entries"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < v->schedule.entries.size(); ++k) {
    const auto& e = v->schedule.entries[k];
    body["entries"].push_back({{"entry_index", k + 1},
                               {"source_frame_index", e.source_frame_index},
                               {"render_pts", e.render_pts},
                               {"flag", to_string(e.flag)}});
  }
  return Reply{200, std::move(body)};
}

FrameReply SessionService::frame(const std::string& video_id, std::size_t k,
                                 const std::optional<std::string>& session_id) {
  const Video* v = video(video_id);
  if (!v) return frame_error(404, "unknown video " + video_id);
  if (k < 1 || k > v->last_frame) return frame_error(404, fmt::format("frame {} outside 1..{}", k, v->last_frame));
  if (!options_.frames_root) return frame_error(404, "no frame directory configured");

  fs::path found;
  for (const std::string& dir : {video_id, v->entry->source_id}) {
    for (const char* ext : kImageExtensions) {
      const fs::path p = *options_.frames_root / dir / fmt::format("{:06}{}", k, ext);
      if (fs::exists(p)) {
        found = p;
        break;
      }
    }
    if (!found.empty()) break;
  }
  if (found.empty()) return frame_error(404, fmt::format("frame {} of {} not found", k, video_id));
  std::ifstream in(found, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) return frame_error(500, "cannot read " + found.string());

  if (session_id && k == v->last_frame) {
    std::lock_guard lock(mutex_);
    if (const auto it = sessions_.find(*session_id); it != sessions_.end()) {
      auto st = it->second.state.find(video_id);
      if (st != it->second.state.end() && st->second == ItemState::pending) st->second = ItemState::played;
    }
  }
  return FrameReply{200, content_type_for(found), std::move(bytes)};
}

Reply SessionService::rate(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    return reject(400, "body is not JSON");
  }
  if (!doc.is_object() || !doc.contains("session_id") || !doc.contains("video_id") || !doc.contains("score")) {
    return reject(400, "expected {session_id, video_id, score}");
  }
  if (!doc["session_id"].is_string() || !doc["video_id"].is_string()) {
    return reject(400, "session_id and video_id must be strings");
  }
  const auto& score = doc["score"];
  if (!score.is_number_integer()) return reject(400, "score must be an integer from 1 to 5");
  const auto value = score.get<std::int64_t>();
  const std::string sid = doc["session_id"].get<std::string>();
  const std::string vid = doc["video_id"].get<std::string>();

  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(sid);
  if (it == sessions_.end()) return reject(404, "unknown session");
  Session& s = it->second;
  const auto st = s.state.find(vid);
  if (st == s.state.end()) return reject(404, "video not in this session's playlist");
  if (value < 1 || value > 5) return reject(422, "score must be an integer from 1 to 5");
  if (st->second == ItemState::pending) return reject(409, "video has not been played");
  if (st->second == ItemState::rated) return reject(409, "video already rated");

  write_rating_row(ratings_, RatingRow{s.subject_id, vid, static_cast<double>(value), utc_now()});
  ratings_.flush();
  if (!ratings_) return reject(500, "ratings file write failed");
  st->second = ItemState::rated;
  ++stored_;
  return Reply{200, {{"accepted", true}}};
}

std::optional<Session> SessionService::session(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::size_t SessionService::stored_ratings() const {
  std::lock_guard lock(mutex_);
  return stored_;
}

}  // namespace qoe::workbench
