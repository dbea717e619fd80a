// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qoe/rational.hpp"

namespace qoe {

/// Seconds per tick, as numerator/denominator (1/1000 means one tick is 1 ms).
struct Timebase {
  std::int64_t numerator = 1;
  std::int64_t denominator = 1000;

  Rational seconds_per_tick() const { return Rational(numerator, denominator); }
  friend bool operator==(const Timebase&, const Timebase&) = default;
};

struct Resolution {
  int width = 0;
  int height = 0;

  std::string str() const;  // "1920x1080"
  static Resolution parse(const std::string& text);
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Per-frame presentation timestamps of one video. Frame k (1-based) is
/// displayed at pts[k - 1] ticks.
struct FrameTimeline {
  std::vector<std::int64_t> pts;
  Timebase timebase;
  Rational framerate{25};
  std::int64_t nominal_duration = 40;  // constant intended PTS interval, in ticks
  Resolution resolution;

  std::size_t frame_count() const noexcept { return pts.size(); }
  std::int64_t first_pts() const { return pts.front(); }
  std::int64_t last_pts() const { return pts.back(); }

  /// PTS of 1-based frame `index`.
  std::int64_t pts_of(std::size_t index) const { return pts.at(index - 1); }

  friend bool operator==(const FrameTimeline&, const FrameTimeline&) = default;
};

/// round(denominator / (framerate * numerator)): one frame interval in ticks.
std::int64_t nominal_duration_for(const Rational& framerate, const Timebase& timebase);

/// Whole seconds (given in microseconds) to ticks, rounding halves up.
std::int64_t micros_to_ticks(std::int64_t micros, const Timebase& timebase);
std::int64_t seconds_to_micros(double seconds);

enum class ViolationKind {
  invalid_timebase,
  invalid_framerate,
  too_few_frames,
  non_increasing_pts,
  non_positive_duration,
  duration_framerate_mismatch,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t index = 0;  // 1-based position of the first offender, 0 when not positional
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Lists every broken timeline invariant; empty means the timeline is usable.
/// A non-increasing step between frames i and i+1 is reported at index i.
std::vector<Violation> validate(const FrameTimeline& timeline);

/// Throws ErrorKind::invalid_argument describing the first violation.
void require_valid(const FrameTimeline& timeline);

FrameTimeline uniform_timeline(std::size_t frame_count, const Rational& framerate, const Timebase& timebase,
                               const Resolution& resolution);

/// Playing time of the source frames: frame_count / framerate.
double duration_seconds(const FrameTimeline& timeline);

}  // namespace qoe
