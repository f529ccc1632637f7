#include "resacc/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace resacc {

void validate_features(const FeatureVector& v) {
  for (double x : v.values)
    if (!std::isfinite(x) || x < 0.0) throw FormatError("feature values must be finite and >= 0");
}

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

}  // namespace

FeatureVector GridGradientExtractor::extract(const Plane8& plane) const {
  if (plane.empty()) throw FormatError("feature extraction: empty plane");
  const int w = plane.width();
  const int h = plane.height();
  // Pad to a multiple of the grid by replicating the last row/column.
  const int pw = (w + kGrid - 1) / kGrid * kGrid;
  const int ph = (h + kGrid - 1) / kGrid * kGrid;
  const int cw = pw / kGrid;
  const int ch = ph / kGrid;
  auto px = [&](int x, int y) -> int { return plane(clamp_index(x, w), clamp_index(y, h)); };

  FeatureVector out;
  out.values.assign(kDim, 0.0);
  constexpr double bin_width = std::numbers::pi / kBins;

  for (int gy = 0; gy < kGrid; ++gy) {
    for (int gx = 0; gx < kGrid; ++gx) {
      double* cell = out.values.data() + (gy * kGrid + gx) * (1 + kBins);
      double energy = 0.0;
      double hist[kBins] = {};
      for (int y = gy * ch; y < (gy + 1) * ch; ++y) {
        for (int x = gx * cw; x < (gx + 1) * cw; ++x) {
          energy += std::min(std::abs(px(x, y) - 128), 127);
          // Central differences on the replication-padded plane.
          const double dx = px(std::min(x + 1, pw - 1), y) - px(std::max(x - 1, 0), y);
          const double dy = px(x, std::min(y + 1, ph - 1)) - px(x, std::max(y - 1, 0));
          const double mag = std::hypot(dx, dy);
          if (mag == 0.0) continue;
          double theta = std::atan2(dy, dx);
          if (theta < 0.0) theta += std::numbers::pi;
          int bin = static_cast<int>(theta / bin_width);
          if (bin >= kBins) bin = 0;  // theta == pi is orientation 0
          hist[bin] += mag;
        }
      }
      cell[0] = energy / (static_cast<double>(cw) * ch);
      double total = 0.0;
      for (double v : hist) total += v;
      if (total > 0.0)
        for (int b = 0; b < kBins; ++b) cell[1 + b] = hist[b] / total;
    }
  }
  return out;
}

FeatureVector extract_features(const Plane8& plane) {
  static const GridGradientExtractor extractor;
  return extractor.extract(plane);
}

std::vector<FeatureVector> pot_pool(std::span<const FeatureVector> rows, int partitions) {
  if (partitions < 1) throw FormatError("pot_pool: partitions must be >= 1");
  if (rows.empty()) throw FormatError("pot_pool: empty feature matrix");
  const std::size_t dim = rows.front().dim();
  for (const auto& r : rows)
    if (r.dim() != dim) throw FormatError("pot_pool: nonuniform feature dimension");

  const std::size_t t = rows.size();
  const std::size_t p = static_cast<std::size_t>(partitions);
  const std::size_t base = t / p;
  const std::size_t extra = t % p;
  std::vector<FeatureVector> out;
  out.reserve(p);
  std::size_t begin = 0;
  for (std::size_t s = 0; s < p; ++s) {
    const std::size_t len = base + (s < extra ? 1 : 0);
    if (len == 0) {
      out.push_back(rows.back());
      continue;
    }
    FeatureVector pooled = rows[begin];
    for (std::size_t r = begin + 1; r < begin + len; ++r)
      for (std::size_t d = 0; d < dim; ++d)
        pooled.values[d] = std::max(pooled.values[d], rows[r].values[d]);
    out.push_back(std::move(pooled));
    begin += len;
  }
  return out;
}

int partition_and_vote(std::span<const int> labels, std::span<const double> scores) {
  if (labels.empty()) throw FormatError("vote: no decisions");
  if (scores.size() != labels.size()) throw FormatError("vote: scores not aligned with labels");
  struct Tally {
    int votes = 0;
    double score = 0.0;
  };
  std::map<int, Tally> tally;  // ordered by label id
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& t = tally[labels[i]];
    ++t.votes;
    t.score += scores[i];
  }
  auto best = tally.begin();
  for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
    const auto& a = it->second;
    const auto& b = best->second;
    if (a.votes > b.votes || (a.votes == b.votes && a.score < b.score)) best = it;
  }
  return best->first;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw FormatError("not a number: '" + std::string(text) + "'");
  return v;
}

void write_feature_csv(std::ostream& out, std::span<const FeatureRow> rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().features.dim();
  out << "group_id,first_index,last_index";
  for (std::size_t d = 0; d < dim; ++d) out << ",f" << d;
  out << '\n';
  for (const auto& r : rows) {
    if (r.features.dim() != dim) throw FormatError("feature csv: nonuniform dimension");
    out << r.group_id << ',' << r.first_index << ',' << r.last_index;
    for (double v : r.features.values) out << ',' << format_double(v);
    out << '\n';
  }
}

namespace {

template <typename Int>
Int parse_int(std::string_view text) {
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw FormatError("not an integer: '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  for (;;) {
    const auto comma = line.find(',');
    cells.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return cells;
}

}  // namespace

std::vector<FeatureRow> read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("feature csv: missing header");
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "group_id" || header[1] != "first_index" ||
      header[2] != "last_index")
    throw FormatError("feature csv: unexpected header");
  std::vector<FeatureRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    const std::string where = "feature csv line " + std::to_string(line_no) + ": ";
    if (cells.size() != header.size())
      throw FormatError(where + "expected " + std::to_string(header.size()) + " columns, got " +
                        std::to_string(cells.size()));
    FeatureRow row;
    try {
      row.group_id = parse_int<std::int64_t>(cells[0]);
      row.first_index = parse_int<std::uint32_t>(cells[1]);
      row.last_index = parse_int<std::uint32_t>(cells[2]);
      for (std::size_t i = 3; i < cells.size(); ++i)
        row.features.values.push_back(parse_double(cells[i]));
      validate_features(row.features);
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace resacc
