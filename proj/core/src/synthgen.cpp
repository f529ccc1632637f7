#include "resacc/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "resacc/features.hpp"

namespace resacc {

int ClipSpec::frame_count() const noexcept {
  int n = 0;
  for (const auto& e : events) n += e.duration;
  return n;
}

void ClipSpec::validate() const {
  if (!Frame::valid_dimensions(width, height))
    throw FormatError("clip: width/height must be positive multiples of 16");
  if (events.empty()) throw FormatError("clip: at least one event is required");
  for (const auto& e : events) {
    if (e.duration < 1) throw FormatError("clip: event duration must be >= 1");
    if (!std::isfinite(e.vx) || !std::isfinite(e.vy))
      throw FormatError("clip: event velocity must be finite");
  }
  if (sprite_width < 1 || sprite_height < 1)
    throw FormatError("clip: sprite size must be positive");
  if (sprite_width > width || sprite_height > height)
    throw FormatError("clip: sprite larger than frame");
  if (pyramid_step < 1) throw FormatError("clip: pyramid_step must be >= 1");
  auto in_byte = [](int v) { return v >= 0 && v <= 255; };
  if (!in_byte(sprite_intensity) || !in_byte(background))
    throw FormatError("clip: intensities must be in [0, 255]");
  if (noise < 0 || noise > 127) throw FormatError("clip: noise must be in [0, 127]");
  if (flicker < 0 || flicker > 255) throw FormatError("clip: flicker must be in [0, 255]");
}

namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// Sprite intensity offset (relative to background) at sprite-local (x, y).
int sprite_level(const ClipSpec& spec, int amplitude, int x, int y) {
  if (spec.profile == SpriteProfile::flat) return amplitude;
  const int d = std::min({x, spec.sprite_width - 1 - x, y, spec.sprite_height - 1 - y});
  const int half = (std::min(spec.sprite_width, spec.sprite_height) + 1) / 2;
  const int levels = (half + spec.pyramid_step - 1) / spec.pyramid_step;
  const int band = std::min(d / spec.pyramid_step + 1, levels);
  return amplitude * band / levels;
}

}  // namespace

std::vector<Frame> generate(const ClipSpec& spec) {
  spec.validate();
  const double max_x = spec.width - spec.sprite_width;
  const double max_y = spec.height - spec.sprite_height;
  double px = std::clamp(spec.start_x.value_or(max_x / 2.0), 0.0, max_x);
  double py = std::clamp(spec.start_y.value_or(max_y / 2.0), 0.0, max_y);

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(spec.frame_count()));
  int t = 0;
  for (const auto& event : spec.events) {
    for (int k = 0; k < event.duration; ++k, ++t) {
      if (t > 0) {
        px = std::clamp(px + event.vx, 0.0, max_x);
        py = std::clamp(py + event.vy, 0.0, max_y);
      }
      const int sx = round_half_up(px);
      const int sy = round_half_up(py);
      const int intensity = std::clamp(
          spec.sprite_intensity + (spec.flicker == 0 ? 0 : (t % 2 == 0 ? spec.flicker : -spec.flicker)),
          0, 255);
      const int amplitude = intensity - spec.background;

      Plane8 plane(spec.width, spec.height);
      const std::uint64_t frame_key = mix64(spec.seed ^ mix64(static_cast<std::uint64_t>(t)));
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          int v = spec.background;
          if (x >= sx && x < sx + spec.sprite_width && y >= sy && y < sy + spec.sprite_height)
            v += sprite_level(spec, amplitude, x - sx, y - sy);
          if (spec.noise > 0) {
            const auto idx = static_cast<std::uint64_t>(y) * spec.width + x;
            const auto r = mix64(frame_key + idx);
            v += static_cast<int>(r % static_cast<std::uint64_t>(2 * spec.noise + 1)) - spec.noise;
          }
          plane(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        }
      }
      frames.emplace_back(std::move(plane));
    }
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  const double d = parse_double(v);
  if (d != std::floor(d)) throw FormatError("clip: " + key + " must be an integer");
  return static_cast<int>(d);
}

}  // namespace

ClipSpec parse_clip_spec(std::istream& in) {
  ClipSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("clip spec line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "width") spec.width = to_int(key, value);
      else if (key == "height") spec.height = to_int(key, value);
      else if (key == "sprite_width") spec.sprite_width = to_int(key, value);
      else if (key == "sprite_height") spec.sprite_height = to_int(key, value);
      else if (key == "sprite_intensity") spec.sprite_intensity = to_int(key, value);
      else if (key == "profile") {
        if (value == "flat") spec.profile = SpriteProfile::flat;
        else if (value == "pyramid") spec.profile = SpriteProfile::pyramid;
        else throw FormatError("clip: profile must be flat or pyramid");
      } else if (key == "pyramid_step") spec.pyramid_step = to_int(key, value);
      else if (key == "start_x") spec.start_x = parse_double(value);
      else if (key == "start_y") spec.start_y = parse_double(value);
      else if (key == "background") spec.background = to_int(key, value);
      else if (key == "noise") spec.noise = to_int(key, value);
      else if (key == "flicker") spec.flicker = to_int(key, value);
      else if (key == "seed") {
        std::istringstream vs(value);
        if (!(vs >> spec.seed)) throw FormatError("clip: seed must be an unsigned integer");
      } else if (key == "event") {
        std::istringstream vs(value);
        std::string d, vx, vy;
        if (!(vs >> d >> vx >> vy)) throw FormatError("clip: event needs 'duration vx vy'");
        spec.events.push_back({to_int("duration", d), parse_double(vx), parse_double(vy)});
      } else {
        throw FormatError("clip: unknown key '" + key + "'");
      }
    } catch (const FormatError& e) {
      throw FormatError("clip spec line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

void write_clip_spec(std::ostream& out, const ClipSpec& spec) {
  out << "width = " << spec.width << '\n'
      << "height = " << spec.height << '\n'
      << "background = " << spec.background << '\n'
      << "sprite_width = " << spec.sprite_width << '\n'
      << "sprite_height = " << spec.sprite_height << '\n'
      << "sprite_intensity = " << spec.sprite_intensity << '\n'
      << "profile = " << (spec.profile == SpriteProfile::flat ? "flat" : "pyramid") << '\n';
  if (spec.profile == SpriteProfile::pyramid) out << "pyramid_step = " << spec.pyramid_step << '\n';
  if (spec.start_x) out << "start_x = " << format_double(*spec.start_x) << '\n';
  if (spec.start_y) out << "start_y = " << format_double(*spec.start_y) << '\n';
  out << "noise = " << spec.noise << '\n'
      << "flicker = " << spec.flicker << '\n'
      << "seed = " << spec.seed << '\n';
  for (const auto& e : spec.events)
    out << "event = " << e.duration << ' ' << format_double(e.vx) << ' ' << format_double(e.vy)
        << '\n';
}

// ---------------------------------------------------------------------------
// Corpora

std::vector<CorpusEntry> action_corpus(std::uint64_t seed, int per_class) {
  static const char* kLabels[] = {"horizontal", "vertical", "flicker"};
  SplitMix rng(seed);
  std::vector<CorpusEntry> out;
  for (int cls = 0; cls < 3; ++cls) {
    for (int i = 0; i < per_class; ++i) {
      ClipSpec s;
      s.width = 160;
      s.height = 128;
      s.sprite_width = rng.uniform(24, 40);
      s.sprite_height = rng.uniform(24, 40);
      s.background = rng.uniform(30, 70);
      s.sprite_intensity = rng.uniform(170, 230);
      s.noise = 1;
      s.seed = rng.next();
      s.start_x = (s.width - s.sprite_width) / 2 + rng.uniform(-8, 8);
      s.start_y = (s.height - s.sprite_height) / 2 + rng.uniform(-8, 8);
      const int frames = 40;
      if (cls == 2) {
        s.flicker = rng.uniform(20, 40);
        s.events.push_back({frames, 0.0, 0.0});
      } else {
        const double speed = rng.uniform(2, 4);
        int left = frames;
        double dir = rng.uniform(0, 1) == 0 ? -1.0 : 1.0;
        while (left > 0) {
          const int d = std::min(left, rng.uniform(8, 14));
          s.events.push_back(cls == 0 ? MotionEvent{d, dir * speed, 0.0}
                                      : MotionEvent{d, 0.0, dir * speed});
          dir = -dir;
          left -= d;
        }
      }
      char name[32];
      std::snprintf(name, sizeof name, "%s_%02d", kLabels[cls], i);
      out.push_back({name, kLabels[cls], i < per_class / 2 ? "train" : "test", std::move(s)});
    }
  }
  return out;
}

std::vector<CorpusEntry> surveillance_corpus(std::uint64_t seed, int clips) {
  // Unit vectors at 45 degree steps; literal so no libm call is involved.
  constexpr double r = 0.70710678118654752;
  static constexpr double kDirections[8][2] = {{1, 0}, {r, r}, {0, 1}, {-r, r},
                                               {-1, 0}, {-r, -r}, {0, -1}, {r, -r}};
  SplitMix rng(seed);
  std::vector<CorpusEntry> out;
  for (int i = 0; i < clips; ++i) {
    ClipSpec s;
    s.width = 320;
    s.height = 240;
    s.sprite_width = rng.uniform(24, 64);
    s.sprite_height = rng.uniform(32, 80);
    s.background = rng.uniform(30, 90);
    s.sprite_intensity = rng.uniform(150, 230);
    s.noise = 2;
    s.seed = rng.next();
    s.start_x = rng.uniform(0, s.width - s.sprite_width);
    s.start_y = rng.uniform(0, s.height - s.sprite_height);
    int left = 60;
    bool burst = false;
    while (left > 0) {
      const int d = std::min(left, burst ? rng.uniform(3, 8) : rng.uniform(8, 20));
      const double speed = burst ? rng.uniform_real(3.0, 6.0) : rng.uniform_real(0.25, 1.0);
      const auto& dir = kDirections[rng.uniform(0, 7)];
      s.events.push_back({d, speed * dir[0], speed * dir[1]});
      burst = !burst;
      left -= d;
    }
    char name[32];
    std::snprintf(name, sizeof name, "cam_%02d", i);
    out.push_back({name, "-", "none", std::move(s)});
  }
  return out;
}

}  // namespace resacc
