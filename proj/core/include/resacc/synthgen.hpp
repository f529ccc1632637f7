#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "resacc/frame.hpp"

namespace resacc {

// SplitMix64 finalizer. Every random quantity in synthetic clips derives
// from it, so output is identical on every platform.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream of uniform draws.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept { return mix64(state_++ * 0x2545f4914f6cdd1dULL); }
  // Uniform integer in [lo, hi].
  int uniform(int lo, int hi) noexcept {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  // Uniform in [lo, hi) with 1/1024 resolution.
  double uniform_real(double lo, double hi) noexcept {
    return lo + (hi - lo) * static_cast<double>(next() % 1024) / 1024.0;
  }

 private:
  std::uint64_t state_;
};

struct MotionEvent {
  int duration = 1;   // frames
  double vx = 0.0;    // pels / frame
  double vy = 0.0;

  bool operator==(const MotionEvent&) const = default;
};

enum class SpriteProfile { flat, pyramid };

struct ClipSpec {
  int width = 320;
  int height = 240;
  std::vector<MotionEvent> events;
  int sprite_width = 48;
  int sprite_height = 48;
  int sprite_intensity = 200;
  // pyramid: stepped plateau rising by one level every `pyramid_step` pels
  // from the sprite border inward.
  SpriteProfile profile = SpriteProfile::flat;
  int pyramid_step = 8;
  // Top-left sprite corner at frame 0; centred when unset.
  std::optional<double> start_x;
  std::optional<double> start_y;
  int background = 40;
  int noise = 0;    // per-pixel, per-frame uniform integer in [-noise, noise]
  int flicker = 0;  // sprite intensity alternates +flicker / -flicker
  std::uint64_t seed = 0;

  int frame_count() const noexcept;
  // Throws FormatError naming the violated constraint.
  void validate() const;

  bool operator==(const ClipSpec&) const = default;
};

// Sprite translating with piecewise-constant velocity; clamps at borders.
std::vector<Frame> generate(const ClipSpec& spec);

// Key-value text: "key = value" lines, '#' comments, one "event = d vx vy"
// line per event.
ClipSpec parse_clip_spec(std::istream& in);
void write_clip_spec(std::ostream& out, const ClipSpec& spec);

struct CorpusEntry {
  std::string name;
  std::string label;
  std::string split;  // train | test | none
  ClipSpec spec;
};

// Three action classes (horizontal sweep, vertical sweep, static flicker),
// `per_class` clips each; the first half of every class is "train".
std::vector<CorpusEntry> action_corpus(std::uint64_t seed, int per_class = 10);

// Unlabelled 320x240 clips mixing slow drift with short motion bursts.
std::vector<CorpusEntry> surveillance_corpus(std::uint64_t seed, int clips = 20);

}  // namespace resacc
