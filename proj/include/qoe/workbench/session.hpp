// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qoe/restructure.hpp"
#include "qoe/workbench/manifest.hpp"

namespace qoe::workbench {

enum class ItemState { pending, played, rated };
std::string to_string(ItemState state);

/// One subject's single-stimulus run through the corpus.
struct Session {
  std::string session_id;
  std::string subject_id;
  std::uint64_t playlist_seed = 0;
  std::vector<std::string> playlist;
  std::map<std::string, ItemState> state;
  std::string method = "SS";
};

struct ServiceOptions {
  std::filesystem::path ratings_out;
  std::optional<std::filesystem::path> frames_root;  // <root>/<video_id or source_id>/<k:06>.<ext>
  std::uint64_t seed = 0;
};

/// JSON reply of one protocol call.
struct Reply {
  int status = 200;
  nlohmann::ordered_json body;
};

struct FrameReply {
  int status = 200;
  std::string content_type;
  std::string bytes;  // image, or a JSON error body
};

/// State and rules behind the rating protocol, independent of the transport.
/// Thread safe; ratings are appended one complete, flushed row at a time.
class SessionService {
 public:
  SessionService(CorpusManifest manifest, ServiceOptions options);

  /// GET /api/session?subject=<id>. A subject keeps one session; asking again
  /// returns it unchanged.
  Reply open_session(const std::string& subject_id);
  /// GET /api/video/<id>/schedule
  Reply schedule(const std::string& video_id) const;
  /// GET /api/video/<id>/frame/<k>[?session=<sid>]. Fetching the last frame
  /// within a session marks the video as played.
  FrameReply frame(const std::string& video_id, std::size_t k, const std::optional<std::string>& session_id);
  /// POST /api/rating with {session_id, video_id, score}
  Reply rate(const std::string& body);

  std::optional<Session> session(const std::string& session_id) const;
  std::size_t stored_ratings() const;

 private:
  struct Video {
    const ManifestEntry* entry = nullptr;
    RenderSchedule schedule;
    std::size_t last_frame = 0;
  };

  const Video* video(const std::string& id) const;
  Reply reject(int status, const std::string& reason) const;

  CorpusManifest manifest_;
  ServiceOptions options_;
  std::map<std::string, Video> videos_;
  std::vector<std::string> order_;  // manifest order

  mutable std::mutex mutex_;
  std::map<std::string, Session> sessions_;        // by session id
  std::map<std::string, std::string> by_subject_;  // subject -> session id
  std::ofstream ratings_;
  std::size_t stored_ = 0;
};

}  // namespace qoe::workbench
