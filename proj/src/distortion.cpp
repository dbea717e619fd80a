// SPDX-License-Identifier: Apache-2.0

#include "qoe/distortion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "qoe/error.hpp"

namespace qoe {
namespace {

constexpr std::array<double, 2> kShort{0.5, 1.0};
constexpr std::array<double, 3> kMedium{1.5, 2.0, 2.5};
constexpr std::array<double, 4> kLong{3.0, 3.5, 4.0, 4.5};
constexpr std::array<double, 3> kExtraLong{5.0, 5.5, 6.0};

constexpr std::array<WeightedRate, 1> kRatesFirst1080{{{1.0, 1.0}}};
constexpr std::array<WeightedRate, 5> kRatesSecond1080{
    {{1.1, 0.30}, {1.25, 0.30}, {1.5, 0.15}, {1.75, 0.15}, {2.25, 0.15}}};
constexpr std::array<WeightedRate, 6> kRatesFirst720{
    {{1.0, 0.25}, {1.1, 0.25}, {1.25, 0.20}, {1.5, 0.15}, {1.75, 0.10}, {2.25, 0.05}}};

constexpr std::array<int, 5> kPaperCrfs{15, 22, 27, 32, 37};

// Leading and trailing margin kept free of stall onsets, and the minimum
// spacing between two onsets (two frames even at 20 fps).
constexpr std::int64_t kOnsetMarginMs = 500;
constexpr std::int64_t kOnsetSpacingMs = 100;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64's output sequence is fixed by the standard; the distributions in
// <random> are not, so draws are mapped by hand.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t index(std::size_t size) {
    return std::min(size - 1, static_cast<std::size_t>(unit() * static_cast<double>(size)));
  }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(index(static_cast<std::size_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

using C = DurationCategory;

std::vector<ModeTemplate> build_modes() {
  const C s = C::short_stall;
  const C m = C::medium_stall;
  const C l = C::long_stall;
  const C el = C::extra_long_stall;
  const std::vector<std::pair<std::string, std::vector<C>>> rows = {
      {"A1", {s}},       {"A1", {s}},       {"A2", {m}},       {"A2", {m}},       {"A3", {l}},
      {"A3", {l}},       {"A4", {el}},      {"A4", {el}},      {"B1", {s, s}},    {"B2", {s, m}},
      {"B3", {s, l}},    {"B4", {s, el}},   {"B5", {m, m}},    {"B6", {m, l}},    {"B7", {m, el}},
      {"B8", {l, l}},    {"C1", {s, s, s}}, {"C2", {s, s, m}}, {"C3", {s, s, l}}, {"C4", {s, l, l}},
      {"C5", {s, m, l}},
  };
  std::vector<ModeTemplate> modes;
  int slot = 1;
  for (const auto& [label, cats] : rows) modes.push_back(ModeTemplate{label, slot++, cats});
  return modes;
}

bool duration_in_category(double seconds, DurationCategory category) {
  const auto micros = seconds_to_micros(seconds);
  return std::ranges::any_of(category_durations(category),
                             [&](double v) { return seconds_to_micros(v) == micros; });
}

std::vector<DurationCategory> sorted_categories(std::vector<DurationCategory> cats) {
  std::ranges::sort(cats);
  return cats;
}

std::string batch_tag(Batch batch) {
  switch (batch) {
    case Batch::hd1080_first: return "b1";
    case Batch::hd1080_second: return "b2";
    case Batch::hd720_first: return "b1";
  }
  return "b?";
}

}  // namespace

std::string to_string(DurationCategory category) {
  switch (category) {
    case C::short_stall: return "short";
    case C::medium_stall: return "medium";
    case C::long_stall: return "long";
    case C::extra_long_stall: return "extra_long";
  }
  return "unknown";
}

DurationCategory parse_duration_category(const std::string& text) {
  if (text == "short") return C::short_stall;
  if (text == "medium") return C::medium_stall;
  if (text == "long") return C::long_stall;
  if (text == "extra_long") return C::extra_long_stall;
  fail(ErrorKind::parse_error, "unknown duration category '" + text + "'");
}

std::span<const double> category_durations(DurationCategory category) {
  switch (category) {
    case C::short_stall: return kShort;
    case C::medium_stall: return kMedium;
    case C::long_stall: return kLong;
    case C::extra_long_stall: return kExtraLong;
  }
  return {};
}

std::string to_string(Batch batch) {
  switch (batch) {
    case Batch::hd1080_first: return "1080p_batch1";
    case Batch::hd1080_second: return "1080p_batch2";
    case Batch::hd720_first: return "720p_batch1";
  }
  return "unknown";
}

Batch parse_batch(const std::string& text) {
  if (text == "1080p_batch1") return Batch::hd1080_first;
  if (text == "1080p_batch2") return Batch::hd1080_second;
  if (text == "720p_batch1") return Batch::hd720_first;
  fail(ErrorKind::parse_error, "unknown batch '" + text + "'");
}

std::span<const WeightedRate> acceleration_rate_distribution(Batch batch) {
  switch (batch) {
    case Batch::hd1080_first: return kRatesFirst1080;
    case Batch::hd1080_second: return kRatesSecond1080;
    case Batch::hd720_first: return kRatesFirst720;
  }
  return {};
}

const std::vector<ModeTemplate>& enumerate_stall_modes() {
  static const std::vector<ModeTemplate> modes = build_modes();
  return modes;
}

const ModeTemplate& mode_by_label(const std::string& label) {
  for (const auto& mode : enumerate_stall_modes()) {
    if (mode.label == label) return mode;
  }
  fail(ErrorKind::invalid_recipe, "unknown stalling mode '" + label + "'");
}

void validate_recipe(const DistortionRecipe& recipe) {
  auto bad = [](const std::string& why) { fail(ErrorKind::invalid_recipe, why); };

  if (!std::isfinite(recipe.acceleration_rate) || recipe.acceleration_rate < 1.0) {
    bad(fmt::format("acceleration rate {} below 1", recipe.acceleration_rate));
  }
  if (recipe.crf && std::ranges::find(kPaperCrfs, *recipe.crf) == kPaperCrfs.end()) {
    bad(fmt::format("crf {} not in {{15, 22, 27, 32, 37}}", *recipe.crf));
  }
  if (recipe.mode_id == kCleanMode) {
    if (!recipe.stalls.empty()) bad("a clean recipe cannot carry stalls");
    return;
  }
  const bool custom = recipe.mode_id == kCustomMode;
  const ModeTemplate* mode = custom ? nullptr : &mode_by_label(recipe.mode_id);
  if (recipe.stalls.empty() || recipe.stalls.size() > 3) {
    bad(fmt::format("{} stalls, expected 1 to 3", recipe.stalls.size()));
  }
  std::vector<DurationCategory> cats;
  for (std::size_t j = 0; j < recipe.stalls.size(); ++j) {
    const StallEvent& s = recipe.stalls[j];
    if (!std::isfinite(s.onset_seconds) || s.onset_seconds < 0) bad(fmt::format("stall {} has a negative onset", j + 1));
    if (!std::isfinite(s.duration_seconds) || s.duration_seconds <= 0) {
      bad(fmt::format("stall {} has a non-positive duration", j + 1));
    }
    if (!custom && !duration_in_category(s.duration_seconds, s.category)) {
      bad(fmt::format("stall {} lasts {} s, not a {} duration", j + 1, s.duration_seconds, to_string(s.category)));
    }
    if (j > 0 && seconds_to_micros(s.onset_seconds) <= seconds_to_micros(recipe.stalls[j - 1].onset_seconds)) {
      bad("stall onsets must be strictly increasing");
    }
    cats.push_back(s.category);
  }
  if (mode && sorted_categories(cats) != sorted_categories(mode->categories)) {
    bad("stall categories do not match mode " + mode->label);
  }
}

Rational acceleration_rate_of(const DistortionRecipe& recipe) { return Rational::from_decimal(recipe.acceleration_rate); }

std::vector<std::size_t> stall_frame_indices(const DistortionRecipe& recipe, const Rational& framerate,
                                             std::size_t frame_count) {
  std::vector<std::size_t> out;
  out.reserve(recipe.stalls.size());
  for (const auto& stall : recipe.stalls) {
    const std::int64_t micros = seconds_to_micros(stall.onset_seconds);
    const std::int64_t raw = round_div(__int128{micros} * framerate.num(), __int128{framerate.den()} * 1'000'000);
    const auto index = static_cast<std::size_t>(std::clamp<std::int64_t>(raw, 1, static_cast<std::int64_t>(frame_count)));
    if (!out.empty() && index <= out.back()) {
      fail(ErrorKind::invalid_recipe,
           fmt::format("stalls at {} s and an earlier onset both map to frame {}", stall.onset_seconds, index));
    }
    out.push_back(index);
  }
  return out;
}

std::vector<std::int64_t> pts_delays(const DistortionRecipe& recipe, const Timebase& timebase) {
  std::vector<std::int64_t> out;
  out.reserve(recipe.stalls.size());
  for (const auto& stall : recipe.stalls) out.push_back(micros_to_ticks(seconds_to_micros(stall.duration_seconds), timebase));
  return out;
}

std::vector<std::int64_t> cumulative_delays(std::span<const std::size_t> stall_frames,
                                            std::span<const std::int64_t> delays, std::size_t frame_count) {
  if (stall_frames.size() != delays.size()) fail(ErrorKind::invalid_argument, "one delay per stall frame expected");
  std::vector<std::int64_t> out(frame_count, 0);
  std::int64_t carried = 0;
  std::size_t next = 0;
  for (std::size_t i = 1; i <= frame_count; ++i) {
    while (next < stall_frames.size() && stall_frames[next] < i) carried += delays[next++];
    out[i - 1] = carried;
  }
  return out;
}

std::int64_t catchup_frame_count(double duration_seconds, const Rational& acceleration_rate, const Rational& framerate) {
  if (acceleration_rate < Rational(1)) fail(ErrorKind::invalid_argument, "acceleration rate below 1");
  if (acceleration_rate == Rational(1)) return 0;
  // t * AR * fps / (AR - 1) with AR = a/b reduces to t * a * fps / (a - b)
  const std::int64_t a = acceleration_rate.num();
  const std::int64_t b = acceleration_rate.den();
  const std::int64_t micros = seconds_to_micros(duration_seconds);
  return round_div(__int128{micros} * a * framerate.num(), __int128{1'000'000} * framerate.den() * (a - b));
}

SynthesisResult synthesize_output_pts(const FrameTimeline& source, const DistortionRecipe& recipe) {
  require_valid(source);
  for (std::size_t i = 1; i < source.frame_count(); ++i) {
    if (source.pts[i] - source.pts[i - 1] != source.nominal_duration) {
      fail(ErrorKind::invalid_argument, fmt::format("source timeline is not uniform at frame {}", i));
    }
  }
  validate_recipe(recipe);
  const double duration = duration_seconds(source);
  for (const auto& stall : recipe.stalls) {
    if (stall.onset_seconds > duration) {
      fail(ErrorKind::invalid_recipe, fmt::format("stall onset {} s beyond the {} s video", stall.onset_seconds, duration));
    }
  }

  const std::size_t n = source.frame_count();
  const Rational ar = acceleration_rate_of(recipe);
  DistortionPlan plan;
  plan.stall_frame_indices = stall_frame_indices(recipe, source.framerate, n);
  plan.pts_delays = pts_delays(recipe, source.timebase);
  plan.cumulative_delays = cumulative_delays(plan.stall_frame_indices, plan.pts_delays, n);

  const auto& sf = plan.stall_frame_indices;
  const std::size_t m = sf.size();
  for (const auto& stall : recipe.stalls) {
    plan.catchup_counts.push_back(catchup_frame_count(stall.duration_seconds, ar, source.framerate));
  }
  // Each catch-up window ends before the next stall frame, and before the last frame.
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t limit = j + 1 < m ? sf[j + 1] - 1 : n - 1;
    const auto wanted = static_cast<std::size_t>(plan.catchup_counts[j]) + sf[j];
    plan.catchup_end_indices.push_back(std::min(limit, wanted));
  }
  // Fast playback starts with the first frame after the freeze: frames
  // sf_j + 1 .. qne_j arrive after a shortened interval, qn_j of them when the
  // window is not truncated.
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = sf[j] + 1; i <= plan.catchup_end_indices[j]; ++i) plan.accelerated_frames.push_back(i);
  }

  const Rational normal_step(source.nominal_duration);
  const Rational fast_step = normal_step / ar;
  plan.pre_delay_pts.reserve(n);
  plan.pre_delay_pts.emplace_back(source.first_pts());
  std::size_t cursor = 0;
  for (std::size_t i = 2; i <= n; ++i) {
    bool fast = false;
    while (cursor < plan.accelerated_frames.size() && plan.accelerated_frames[cursor] < i) ++cursor;
    if (cursor < plan.accelerated_frames.size() && plan.accelerated_frames[cursor] == i) fast = true;
    plan.pre_delay_pts.push_back(plan.pre_delay_pts.back() + (fast ? fast_step : normal_step));
  }

  FrameTimeline out = source;
  for (std::size_t i = 0; i < n; ++i) {
    out.pts[i] = plan.pre_delay_pts[i].round_half_up() + plan.cumulative_delays[i];
    if (i > 0 && out.pts[i] <= out.pts[i - 1]) {
      fail(ErrorKind::synthesis_degenerate,
           fmt::format("frames {} and {} collapse to PTS {} after rounding", i, i + 1, out.pts[i]));
    }
  }
  return SynthesisResult{std::move(out), std::move(plan)};
}

DistortionRecipe sample_recipe(const ModeTemplate& mode, Batch batch, std::uint64_t seed,
                               double video_duration_seconds) {
  const std::size_t m = mode.categories.size();
  const std::int64_t duration_ms = std::llround(video_duration_seconds * 1000.0);
  const std::int64_t lo = kOnsetMarginMs;
  const std::int64_t hi = duration_ms - kOnsetMarginMs;
  if (m == 0 || hi < lo || hi - lo < static_cast<std::int64_t>(m - 1) * kOnsetSpacingMs) {
    fail(ErrorKind::invalid_argument,
         fmt::format("cannot place {} stalls in a {} s video", m, video_duration_seconds));
  }

  Draws draws(seed);
  DistortionRecipe recipe;
  recipe.mode_id = mode.label;
  recipe.seed = seed;
  recipe.batch = batch;

  // Weights are used as published and normalized by their sum (one row of the
  // table adds up to 105%).
  const auto rates = acceleration_rate_distribution(batch);
  double total = 0.0;
  for (const auto& r : rates) total += r.probability;
  const double u = draws.unit() * total;
  double cumulative = 0.0;
  recipe.acceleration_rate = rates.back().rate;
  for (const auto& r : rates) {
    cumulative += r.probability;
    if (u < cumulative) {
      recipe.acceleration_rate = r.rate;
      break;
    }
  }

  // Temporal order of the categories is part of the draw.
  std::vector<DurationCategory> cats = mode.categories;
  for (std::size_t i = cats.size(); i > 1; --i) std::swap(cats[i - 1], cats[draws.index(i)]);

  std::vector<std::int64_t> onsets;
  for (int attempt = 0;; ++attempt) {
    onsets.clear();
    for (std::size_t j = 0; j < m; ++j) onsets.push_back(draws.between(lo, hi));
    std::ranges::sort(onsets);
    bool spaced = true;
    for (std::size_t j = 1; j < m; ++j) spaced = spaced && onsets[j] - onsets[j - 1] >= kOnsetSpacingMs;
    if (spaced) break;
    if (attempt == 10'000) {
      // Deterministic fallback: evenly spread over the window.
      for (std::size_t j = 0; j < m; ++j) onsets[j] = lo + (hi - lo) * static_cast<std::int64_t>(j) / std::max<std::int64_t>(1, static_cast<std::int64_t>(m) - 1);
      break;
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    const auto values = category_durations(cats[j]);
    recipe.stalls.push_back(StallEvent{static_cast<double>(onsets[j]) / 1000.0, values[draws.index(values.size())], cats[j]});
  }
  return recipe;
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(base_seed) ^ h);
}

std::vector<int> paper_crf_set() { return {kPaperCrfs.begin(), kPaperCrfs.end()}; }

CorpusPlan plan_corpus(std::span<const SourceVideo> sources, std::span<const int> crf_set, int modes_per_video) {
  const auto& modes = enumerate_stall_modes();
  if (modes_per_video < 0 || modes_per_video > static_cast<int>(modes.size())) {
    fail(ErrorKind::invalid_argument, fmt::format("modes_per_video {} outside [0, {}]", modes_per_video, modes.size()));
  }
  CorpusPlan plan;
  std::size_t next_1080 = 0;
  std::size_t next_720 = 0;
  for (const SourceVideo& source : sources) {
    std::vector<Batch> batches;
    std::size_t rank = 0;
    if (source.resolution.height == 1080) {
      batches = {Batch::hd1080_first, Batch::hd1080_second};
      rank = next_1080++;
    } else if (source.resolution.height == 720) {
      batches = {Batch::hd720_first};
      rank = next_720++;
    } else {
      fail(ErrorKind::invalid_argument,
           fmt::format("source {} is {}; only 1080p and 720p sources are planned", source.source_id,
                       source.resolution.str()));
    }
    // Consecutive sources of one resolution walk the mode table, so each
    // slot is used equally often.
    std::vector<int> slots;
    for (int k = 0; k < modes_per_video; ++k) {
      slots.push_back(static_cast<int>((rank * static_cast<std::size_t>(modes_per_video) + static_cast<std::size_t>(k)) % modes.size()) + 1);
    }
    for (int crf : crf_set) {
      CorpusEntry clean{fmt::format("{}_crf{}_clean", source.source_id, crf), source.source_id, source.resolution,
                        source.framerate, crf, std::nullopt, 0};
      plan.entries.push_back(std::move(clean));
      ++plan.clean_count;
      for (Batch batch : batches) {
        for (int slot : slots) {
          const ModeTemplate& mode = modes[static_cast<std::size_t>(slot - 1)];
          plan.entries.push_back(CorpusEntry{
              fmt::format("{}_crf{}_{}_m{:02}{}", source.source_id, crf, batch_tag(batch), slot, mode.label),
              source.source_id, source.resolution, source.framerate, crf, batch, slot});
          ++plan.stalled_count;
        }
      }
    }
  }
  return plan;
}

CorpusPlan corpus_plan(int source_count_per_cell, std::span<const int> crf_set, int modes_per_video) {
  if (source_count_per_cell < 0) fail(ErrorKind::invalid_argument, "negative source count");
  std::vector<SourceVideo> sources;
  for (const auto& [label, res] : {std::pair{"1080p", Resolution{1920, 1080}}, std::pair{"720p", Resolution{1280, 720}}}) {
    for (int fps : {20, 25, 30}) {
      for (int k = 1; k <= source_count_per_cell; ++k) {
        sources.push_back(SourceVideo{fmt::format("{}_{}fps_src{:02}", label, fps, k), res, Rational(fps)});
      }
    }
  }
  return plan_corpus(sources, crf_set, modes_per_video);
}

}  // namespace qoe
