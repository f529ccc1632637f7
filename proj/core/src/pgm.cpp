#include "resacc/pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace resacc {
namespace {

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const char* field) {
  skip_space_and_comments(in);
  int value = -1;
  if (!(in >> value) || value < 0)
    throw FormatError(std::string("pgm: bad or missing ") + field);
  return value;
}

}  // namespace

Plane8 read_pgm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5')
    throw FormatError("pgm: expected P5 magic");
  const int width = read_header_int(in, "width");
  const int height = read_header_int(in, "height");
  const int maxval = read_header_int(in, "maxval");
  if (maxval != 255) throw FormatError("pgm: only maxval 255 is supported");
  // Exactly one whitespace byte separates the header from the raster.
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) throw FormatError("pgm: malformed header");

  Plane8 plane(width, height);
  auto bytes = plane.data();
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
    throw FormatError("pgm: truncated raster");
  return plane;
}

Plane8 read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_pgm(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pgm(std::ostream& out, const Plane8& plane) {
  out << "P5\n" << plane.width() << ' ' << plane.height() << "\n255\n";
  auto bytes = plane.data();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_pgm(const std::filesystem::path& path, const Plane8& plane) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot create " + path.string());
  write_pgm(out, plane);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace resacc
