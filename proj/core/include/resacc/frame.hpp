#pragma once

#include <cstdint>

#include "resacc/plane.hpp"

namespace resacc {

inline constexpr int kMacroblockDim = 16;

// 8-bit luma picture whose dimensions are positive multiples of 16.
class Frame {
 public:
  Frame() = default;
  explicit Frame(Plane8 luma) : luma_(std::move(luma)) {
    if (!valid_dimensions(luma_.width(), luma_.height()))
      throw FormatError("frame dimensions " + std::to_string(luma_.width()) + "x" +
                        std::to_string(luma_.height()) +
                        " are not positive multiples of 16");
  }
  Frame(int width, int height, std::uint8_t fill = 0) : Frame(Plane8(width, height, fill)) {}

  static bool valid_dimensions(int width, int height) noexcept {
    return width > 0 && height > 0 && width % kMacroblockDim == 0 &&
           height % kMacroblockDim == 0;
  }

  int width() const noexcept { return luma_.width(); }
  int height() const noexcept { return luma_.height(); }
  int mb_cols() const noexcept { return width() / kMacroblockDim; }
  int mb_rows() const noexcept { return height() / kMacroblockDim; }

  const Plane8& luma() const noexcept { return luma_; }
  Plane8& luma() noexcept { return luma_; }

  std::uint8_t operator()(int x, int y) const noexcept { return luma_(x, y); }
  std::uint8_t& operator()(int x, int y) noexcept { return luma_(x, y); }

  bool operator==(const Frame&) const = default;

 private:
  Plane8 luma_;
};

enum class FrameType : std::uint8_t { I = 0, P = 1 };

inline const char* to_string(FrameType t) noexcept { return t == FrameType::I ? "I" : "P"; }

}  // namespace resacc
