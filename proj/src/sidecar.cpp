// SPDX-License-Identifier: Apache-2.0

#include "qoe/sidecar.hpp"

#include <fstream>
#include <optional>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "csv.hpp"
#include "qoe/error.hpp"

namespace qoe {
namespace {

constexpr const char* kSidecarHeader = "frame_index,pts,duration_flag";

Timebase parse_timebase(const std::string& text) {
  const Rational r = Rational::parse(text);
  // Keep the written form: 1/90000 stays 1/90000 even though Rational reduces.
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Timebase{r.num(), 1};
  return Timebase{csv::parse_int(text.substr(0, slash), "timebase"), csv::parse_int(text.substr(slash + 1), "timebase")};
}

}  // namespace

StreamHeader header_of(const FrameTimeline& timeline) {
  return StreamHeader{timeline.timebase, timeline.framerate, timeline.resolution, timeline.nominal_duration};
}

void write_preamble(std::ostream& out, const StreamHeader& header) {
  fmt::print(out, "# timebase={}/{}\n", header.timebase.numerator, header.timebase.denominator);
  fmt::print(out, "# framerate={}\n", header.framerate.str());
  fmt::print(out, "# resolution={}\n", header.resolution.str());
  fmt::print(out, "# nominal_duration={}\n", header.nominal_duration);
  out << "# indexing=1-based\n";
}

StreamHeader read_preamble(std::istream& in) {
  std::optional<Timebase> timebase;
  std::optional<Rational> framerate;
  std::optional<Resolution> resolution;
  std::optional<std::int64_t> nominal;
  while (in.peek() == '#') {
    std::string line;
    csv::next_line(in, line);
    const auto start = line.find_first_not_of("# ");
    if (start == std::string::npos) continue;
    const auto body = line.substr(start);
    const auto eq = body.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = body.substr(0, eq);
    const std::string value = body.substr(eq + 1);
    if (key == "timebase") {
      timebase = parse_timebase(value);
    } else if (key == "framerate") {
      framerate = Rational::parse(value);
    } else if (key == "resolution") {
      resolution = Resolution::parse(value);
    } else if (key == "nominal_duration") {
      nominal = csv::parse_int(value, "nominal_duration");
    } else if (key == "indexing" && value != "1-based") {
      fail(ErrorKind::parse_error, "unsupported indexing '" + value + "'");
    }
  }
  if (!timebase || !framerate || !resolution || !nominal) {
    fail(ErrorKind::parse_error, "preamble needs timebase, framerate, resolution and nominal_duration");
  }
  return StreamHeader{*timebase, *framerate, *resolution, *nominal};
}

std::string duration_flag(const FrameTimeline& timeline, std::size_t index) {
  if (index >= timeline.frame_count()) return "normal";
  const std::int64_t interval = timeline.pts_of(index + 1) - timeline.pts_of(index);
  if (interval > timeline.nominal_duration) return "stall";
  if (interval < timeline.nominal_duration - 1) return "accelerated";
  return "normal";
}

void write_sidecar(std::ostream& out, const FrameTimeline& timeline) {
  write_preamble(out, header_of(timeline));
  out << kSidecarHeader << '\n';
  for (std::size_t i = 1; i <= timeline.frame_count(); ++i) {
    fmt::print(out, "{},{},{}\n", i, timeline.pts_of(i), duration_flag(timeline, i));
  }
}

FrameTimeline read_sidecar(std::istream& in) {
  const StreamHeader header = read_preamble(in);
  std::string line;
  if (!csv::next_line(in, line)) fail(ErrorKind::parse_error, "sidecar has no header row");
  csv::expect_header(line, kSidecarHeader);

  FrameTimeline timeline;
  timeline.timebase = header.timebase;
  timeline.framerate = header.framerate;
  timeline.resolution = header.resolution;
  timeline.nominal_duration = header.nominal_duration;
  while (csv::next_line(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 3) fail(ErrorKind::parse_error, "sidecar row needs 3 fields: '" + line + "'");
    const auto index = csv::parse_int(fields[0], "frame_index");
    if (index != static_cast<std::int64_t>(timeline.pts.size()) + 1) {
      fail(ErrorKind::parse_error, fmt::format("frame_index {} out of sequence", index));
    }
    if (fields[2] != "normal" && fields[2] != "stall" && fields[2] != "accelerated") {
      fail(ErrorKind::parse_error, "unknown duration_flag '" + fields[2] + "'");
    }
    timeline.pts.push_back(csv::parse_int(fields[1], "pts"));
  }
  return timeline;
}

void save_sidecar(const std::filesystem::path& path, const FrameTimeline& timeline) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
  write_sidecar(out, timeline);
  if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

FrameTimeline load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
  return read_sidecar(in);
}

}  // namespace qoe
