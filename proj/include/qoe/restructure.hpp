// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qoe/sidecar.hpp"
#include "qoe/timeline.hpp"

namespace qoe {

struct DetectedStall {
  std::size_t frame_index = 0;  // frame shown while playback is frozen
  std::int64_t gap_ticks = 0;   // PTS distance to the next frame
  std::int64_t repeat_count = 0;  // floor(gap / nominal), times the frame is read

  /// Slots added on top of the frame's own display.
  std::int64_t inserted_slots() const noexcept { return repeat_count - 1; }

  friend bool operator==(const DetectedStall&, const DetectedStall&) = default;
};

struct StallReport {
  std::vector<DetectedStall> stalls;
};

/// Every frame whose following PTS gap exceeds the nominal interval.
StallReport detect_stalls(const FrameTimeline& timeline);

enum class EntryFlag { normal, stall_repeat, accelerated };

std::string to_string(EntryFlag flag);
EntryFlag parse_entry_flag(const std::string& text);

struct ScheduleEntry {
  std::size_t source_frame_index = 0;  // 1-based
  std::int64_t render_pts = 0;
  EntryFlag flag = EntryFlag::normal;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

/// Frames in display order, stall frames repeated once per nominal interval.
struct RenderSchedule {
  StreamHeader header;
  std::vector<ScheduleEntry> entries;

  std::size_t entry_count() const noexcept { return entries.size(); }
  std::int64_t nominal_duration() const noexcept { return header.nominal_duration; }

  friend bool operator==(const RenderSchedule& a, const RenderSchedule& b) {
    return a.entries == b.entries && a.header.timebase == b.header.timebase &&
           a.header.framerate == b.header.framerate && a.header.resolution == b.header.resolution &&
           a.header.nominal_duration == b.header.nominal_duration;
  }
};

/// Expands a PTS track into the schedule a player (or the quality model) consumes.
///
/// Non-stall frames are emitted once at their own PTS. A stall frame with
/// repeat count rn is emitted rn times, at p_i + nominal * j for j = 0..rn-1,
/// and the next frame follows at its true PTS, so a gap that is not a whole
/// number of intervals leaves one longer interval rather than a partial repeat.
/// Entries reached after an interval shorter than nominal - 1 tick are flagged
/// accelerated; the inserted repeats are flagged stall_repeat.
RenderSchedule restructure(const FrameTimeline& timeline);

// Schedule file: the sidecar preamble followed by
// entry_index,source_frame_index,render_pts,flag (entry_index is 1-based).
void write_schedule(std::ostream& out, const RenderSchedule& schedule);
RenderSchedule read_schedule(std::istream& in);
void save_schedule(const std::filesystem::path& path, const RenderSchedule& schedule);
RenderSchedule load_schedule(const std::filesystem::path& path);

}  // namespace qoe
