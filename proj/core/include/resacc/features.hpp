#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "resacc/plane.hpp"

namespace resacc {

// Nonnegative, finite feature values.
struct FeatureVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  bool operator==(const FeatureVector&) const = default;
};

// Rows in temporal order, uniform dimension.
using FeatureMatrix = std::vector<FeatureVector>;

// Throws FormatError when any entry is negative or not finite.
void validate_features(const FeatureVector& v);

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual FeatureVector extract(const Plane8& plane) const = 0;
};

// 4x4 grid; per cell one mean |p - 128| energy value (saturated at 127)
// followed by an 8-bin unsigned gradient-orientation histogram built from
// central differences, magnitude weighted and L1 normalized. D = 144.
class GridGradientExtractor final : public FeatureExtractor {
 public:
  static constexpr int kGrid = 4;
  static constexpr int kBins = 8;
  static constexpr std::size_t kDim = kGrid * kGrid * (1 + kBins);

  std::string id() const override { return "grid-gradient-4x4x8"; }
  std::size_t dim() const override { return kDim; }
  FeatureVector extract(const Plane8& plane) const override;
};

// Built-in extractor. Throws FormatError on an empty plane.
FeatureVector extract_features(const Plane8& plane);

// Splits rows into `partitions` contiguous segments (sizes differ by at most
// one, earlier segments take the extra row) and max-pools each. With fewer
// rows than partitions, missing segments repeat the last row.
std::vector<FeatureVector> pot_pool(std::span<const FeatureVector> rows, int partitions);

// Majority label; ties go to the smallest summed score among tied labels,
// then to the lowest label id. Throws FormatError on empty input.
int partition_and_vote(std::span<const int> labels, std::span<const double> scores);

// Feature CSV: header "group_id,first_index,last_index,f0,...", one row per
// accumulated frame.
struct FeatureRow {
  std::int64_t group_id = 0;
  std::uint32_t first_index = 0;
  std::uint32_t last_index = 0;
  FeatureVector features;

  bool operator==(const FeatureRow&) const = default;
};

void write_feature_csv(std::ostream& out, std::span<const FeatureRow> rows);
// Throws FormatError on malformed rows or nonuniform dimension.
std::vector<FeatureRow> read_feature_csv(std::istream& in);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
// Throws FormatError when `text` is not a complete number.
double parse_double(std::string_view text);

}  // namespace resacc
