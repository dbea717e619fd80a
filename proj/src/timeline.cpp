// SPDX-License-Identifier: Apache-2.0

#include "qoe/timeline.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "qoe/error.hpp"

namespace qoe {

std::string Resolution::str() const { return fmt::format("{}x{}", width, height); }

Resolution Resolution::parse(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_w = 0;
    std::size_t used_h = 0;
    const std::string w = text.substr(0, x);
    const std::string h = text.substr(x + 1);
    Resolution r{std::stoi(w, &used_w), std::stoi(h, &used_h)};
    if (used_w != w.size() || used_h != h.size() || r.width <= 0 || r.height <= 0) {
      throw std::invalid_argument(text);
    }
    return r;
  } catch (const std::logic_error&) {
    fail(ErrorKind::parse_error, "malformed resolution '" + text + "'");
  }
}

std::int64_t nominal_duration_for(const Rational& framerate, const Timebase& timebase) {
  if (framerate.num() <= 0) fail(ErrorKind::invalid_argument, "framerate must be positive");
  if (timebase.numerator < 1 || timebase.denominator < 1) fail(ErrorKind::invalid_argument, "invalid timebase");
  // ticks per frame = (1 / framerate) / (numerator / denominator)
  return round_div(__int128{timebase.denominator} * framerate.den(), __int128{framerate.num()} * timebase.numerator);
}

std::int64_t seconds_to_micros(double seconds) {
  if (!std::isfinite(seconds)) fail(ErrorKind::invalid_argument, "non-finite seconds value");
  return static_cast<std::int64_t>(std::llround(seconds * 1e6));
}

std::int64_t micros_to_ticks(std::int64_t micros, const Timebase& timebase) {
  return round_div(__int128{micros} * timebase.denominator, __int128{1'000'000} * timebase.numerator);
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::invalid_timebase: return "invalid-timebase";
    case ViolationKind::invalid_framerate: return "invalid-framerate";
    case ViolationKind::too_few_frames: return "too-few-frames";
    case ViolationKind::non_increasing_pts: return "non-strictly-increasing";
    case ViolationKind::non_positive_duration: return "non-positive-duration";
    case ViolationKind::duration_framerate_mismatch: return "duration/framerate mismatch";
  }
  return "unknown";
}

std::vector<Violation> validate(const FrameTimeline& timeline) {
  std::vector<Violation> out;
  const bool timebase_ok = timeline.timebase.numerator >= 1 && timeline.timebase.denominator >= 1;
  const bool framerate_ok = timeline.framerate.num() > 0;
  if (!timebase_ok) {
    out.push_back({ViolationKind::invalid_timebase, 0,
                   fmt::format("timebase {}/{}", timeline.timebase.numerator, timeline.timebase.denominator)});
  }
  if (!framerate_ok) {
    out.push_back({ViolationKind::invalid_framerate, 0, "framerate " + timeline.framerate.str()});
  }
  if (timeline.pts.size() < 2) {
    out.push_back({ViolationKind::too_few_frames, 0, fmt::format("{} frames", timeline.pts.size())});
  }
  for (std::size_t i = 1; i < timeline.pts.size(); ++i) {
    if (timeline.pts[i] <= timeline.pts[i - 1]) {
      out.push_back({ViolationKind::non_increasing_pts, i,
                     fmt::format("pts {} -> {}", timeline.pts[i - 1], timeline.pts[i])});
      break;
    }
  }
  if (timeline.nominal_duration <= 0) {
    out.push_back({ViolationKind::non_positive_duration, 0, fmt::format("{}", timeline.nominal_duration)});
  } else if (timebase_ok && framerate_ok) {
    const std::int64_t expected = nominal_duration_for(timeline.framerate, timeline.timebase);
    if (std::llabs(expected - timeline.nominal_duration) > 1) {
      out.push_back({ViolationKind::duration_framerate_mismatch, 0,
                     fmt::format("framerate {} implies {} ticks, got {}", timeline.framerate.str(), expected,
                                 timeline.nominal_duration)});
    }
  }
  return out;
}

void require_valid(const FrameTimeline& timeline) {
  const auto violations = validate(timeline);
  if (!violations.empty()) {
    const auto& v = violations.front();
    fail(ErrorKind::invalid_argument,
         fmt::format("invalid timeline: {}{} ({})", to_string(v.kind),
                     v.index ? fmt::format(" at index {}", v.index) : std::string{}, v.detail));
  }
}

FrameTimeline uniform_timeline(std::size_t frame_count, const Rational& framerate, const Timebase& timebase,
                               const Resolution& resolution) {
  if (frame_count < 2) fail(ErrorKind::invalid_argument, "a timeline needs at least two frames");
  FrameTimeline t;
  t.timebase = timebase;
  t.framerate = framerate;
  t.resolution = resolution;
  t.nominal_duration = nominal_duration_for(framerate, timebase);
  if (t.nominal_duration <= 0) fail(ErrorKind::invalid_argument, "framerate too high for the timebase");
  t.pts.resize(frame_count);
  for (std::size_t i = 0; i < frame_count; ++i) t.pts[i] = static_cast<std::int64_t>(i) * t.nominal_duration;
  return t;
}

double duration_seconds(const FrameTimeline& timeline) {
  return (Rational(static_cast<std::int64_t>(timeline.frame_count())) / timeline.framerate).to_double();
}

}  // namespace qoe
