#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "resacc/errors.hpp"

namespace resacc::pipeline {

// Writes to "<path>.tmp" and renames onto `path` on commit(). An uncommitted
// file is removed on destruction, so failed runs leave no partial output.
class OutputFile {
 public:
  explicit OutputFile(std::filesystem::path path, bool binary = false)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    stream_.open(tmp_, binary ? std::ios::out | std::ios::binary : std::ios::out);
    if (!stream_) throw Error("cannot create " + tmp_.string());
  }
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;
  ~OutputFile() {
    if (!committed_) {
      stream_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ofstream& stream() noexcept { return stream_; }

  void commit() {
    stream_.close();
    if (!stream_) throw Error("write failed: " + tmp_.string());
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream stream_;
  bool committed_ = false;
};

}  // namespace resacc::pipeline
