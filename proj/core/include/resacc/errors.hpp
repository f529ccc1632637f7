#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace resacc {

// Base for every recoverable error raised on bad input data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally invalid values: wrong sizes, bad dimensions, bad config.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Raised while loading a frame sequence; names the offending frame.
class IngestError : public Error {
 public:
  IngestError(std::int64_t frame_index, const std::string& what)
      : Error(frame_index < 0 ? what
                              : "frame " + std::to_string(frame_index) + ": " + what),
        frame_index_(frame_index) {}

  // -1 when the error is not tied to a single frame (e.g. "no frames").
  std::int64_t frame_index() const noexcept { return frame_index_; }

 private:
  std::int64_t frame_index_;
};

// Bitstream parse failure at a byte offset.
class ParseError : public Error {
 public:
  ParseError(std::uint64_t offset, const std::string& what)
      : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// An internal invariant did not hold. Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace resacc
