// SPDX-License-Identifier: Apache-2.0

#include "qoe/restructure.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "csv.hpp"
#include "qoe/error.hpp"

namespace qoe {
namespace {
constexpr const char* kScheduleHeader = "entry_index,source_frame_index,render_pts,flag";
}

StallReport detect_stalls(const FrameTimeline& timeline) {
  StallReport report;
  const std::int64_t nominal = timeline.nominal_duration;
  for (std::size_t i = 1; i < timeline.frame_count(); ++i) {
    const std::int64_t gap = timeline.pts_of(i + 1) - timeline.pts_of(i);
    if (gap > nominal) report.stalls.push_back(DetectedStall{i, gap, gap / nominal});
  }
  return report;
}

std::string to_string(EntryFlag flag) {
  switch (flag) {
    case EntryFlag::normal: return "normal";
    case EntryFlag::stall_repeat: return "stall_repeat";
    case EntryFlag::accelerated: return "accelerated";
  }
  return "unknown";
}

EntryFlag parse_entry_flag(const std::string& text) {
  if (text == "normal") return EntryFlag::normal;
  if (text == "stall_repeat") return EntryFlag::stall_repeat;
  if (text == "accelerated") return EntryFlag::accelerated;
  fail(ErrorKind::parse_error, "unknown schedule flag '" + text + "'");
}

RenderSchedule restructure(const FrameTimeline& timeline) {
  require_valid(timeline);
  RenderSchedule schedule;
  schedule.header = header_of(timeline);
  const std::int64_t nominal = timeline.nominal_duration;
  const std::size_t n = timeline.frame_count();
  schedule.entries.reserve(n);

  auto emit = [&](std::size_t frame, std::int64_t pts, EntryFlag flag) {
    if (flag == EntryFlag::normal && !schedule.entries.empty() &&
        pts - schedule.entries.back().render_pts < nominal - 1) {
      flag = EntryFlag::accelerated;
    }
    schedule.entries.push_back(ScheduleEntry{frame, pts, flag});
  };

  for (std::size_t i = 1; i < n; ++i) {
    const std::int64_t p = timeline.pts_of(i);
    const std::int64_t gap = timeline.pts_of(i + 1) - p;
    emit(i, p, EntryFlag::normal);
    if (gap > nominal) {
      const std::int64_t repeats = gap / nominal;
      for (std::int64_t j = 1; j < repeats; ++j) emit(i, p + nominal * j, EntryFlag::stall_repeat);
    }
  }
  emit(n, timeline.pts_of(n), EntryFlag::normal);
  return schedule;
}

void write_schedule(std::ostream& out, const RenderSchedule& schedule) {
  write_preamble(out, schedule.header);
  out << kScheduleHeader << '\n';
  for (std::size_t k = 0; k < schedule.entries.size(); ++k) {
    const auto& e = schedule.entries[k];
    fmt::print(out, "{},{},{},{}\n", k + 1, e.source_frame_index, e.render_pts, to_string(e.flag));
  }
}

RenderSchedule read_schedule(std::istream& in) {
  RenderSchedule schedule;
  schedule.header = read_preamble(in);
  std::string line;
  if (!csv::next_line(in, line)) fail(ErrorKind::parse_error, "schedule has no header row");
  csv::expect_header(line, kScheduleHeader);
  while (csv::next_line(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 4) fail(ErrorKind::parse_error, "schedule row needs 4 fields: '" + line + "'");
    const auto index = csv::parse_int(fields[0], "entry_index");
    if (index != static_cast<std::int64_t>(schedule.entries.size()) + 1) {
      fail(ErrorKind::parse_error, fmt::format("entry_index {} out of sequence", index));
    }
    const auto frame = csv::parse_int(fields[1], "source_frame_index");
    if (frame < 1) fail(ErrorKind::parse_error, "source_frame_index must be >= 1");
    schedule.entries.push_back(
        ScheduleEntry{static_cast<std::size_t>(frame), csv::parse_int(fields[2], "render_pts"), parse_entry_flag(fields[3])});
  }
  return schedule;
}

void save_schedule(const std::filesystem::path& path, const RenderSchedule& schedule) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  write_schedule(out, schedule);
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

RenderSchedule load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
  return read_schedule(in);
}

}  // namespace qoe
