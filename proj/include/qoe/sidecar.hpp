// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "qoe/timeline.hpp"

namespace qoe {

// Timing sidecar layout:
//
//   # timebase=1/1000
//   # framerate=25/1
//   # resolution=1920x1080
//   # nominal_duration=40
//   # indexing=1-based
//   frame_index,pts,duration_flag
//   1,0,normal
//   ...
//
// duration_flag describes the interval that follows the frame: "stall" when it
// exceeds nominal_duration, "accelerated" when it is shorter than
// nominal_duration - 1 tick, otherwise "normal" (always "normal" on the last row).

/// Shared by sidecars and schedule files.
struct StreamHeader {
  Timebase timebase;
  Rational framerate{25};
  Resolution resolution;
  std::int64_t nominal_duration = 40;
};

StreamHeader header_of(const FrameTimeline& timeline);
void write_preamble(std::ostream& out, const StreamHeader& header);

/// Consumes leading '#' lines; leaves the stream positioned at the CSV header.
StreamHeader read_preamble(std::istream& in);

std::string duration_flag(const FrameTimeline& timeline, std::size_t index);

void write_sidecar(std::ostream& out, const FrameTimeline& timeline);
FrameTimeline read_sidecar(std::istream& in);

void save_sidecar(const std::filesystem::path& path, const FrameTimeline& timeline);
FrameTimeline load_sidecar(const std::filesystem::path& path);

}  // namespace qoe
