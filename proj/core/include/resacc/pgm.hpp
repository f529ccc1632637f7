#pragma once

#include <filesystem>
#include <iosfwd>

#include "resacc/plane.hpp"

namespace resacc {

// Binary PGM (P5, maxval 255). Comment lines in the header are skipped.
// Throws FormatError on malformed content and Error on I/O failure.
Plane8 read_pgm(std::istream& in);
Plane8 read_pgm(const std::filesystem::path& path);

void write_pgm(std::ostream& out, const Plane8& plane);
void write_pgm(const std::filesystem::path& path, const Plane8& plane);

}  // namespace resacc
