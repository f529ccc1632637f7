#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "resacc/partial_decoder.hpp"
#include "resacc/plane.hpp"

namespace resacc {

// Consecutive-residual similarity:
//
//   (2 * sum|prev|*|cur| + c) / (sum prev^2 + sum cur^2 + c)
//
// Sums run over all pixels. The result lies in (0, 1] for c > 0 and is 1
// whenever |prev| == |cur| pixelwise. Throws FormatError on dimension
// mismatch or c <= 0.
double similarity(const Plane16& prev, const Plane16& cur, double c);
inline double similarity(const ResidualFrame& prev, const ResidualFrame& cur, double c) {
  return similarity(prev.values, cur.values, c);
}

// The last N similarity values.
class SimilarityWindow {
 public:
  explicit SimilarityWindow(int capacity);

  int capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool full() const noexcept { return entries_.size() == static_cast<std::size_t>(capacity_); }
  bool empty() const noexcept { return entries_.empty(); }

  // Appends, evicting the oldest entry when full.
  void push(double value);
  void clear() noexcept { entries_.clear(); }

  // Arithmetic mean, evaluated as oldest + sum(e - oldest) / n so that a
  // window of identical values has a mean bit-equal to that value.
  double mean() const;

  const std::deque<double>& entries() const noexcept { return entries_; }

 private:
  int capacity_;
  std::deque<double> entries_;
};

struct AccumulatorConfig {
  int window_size = 10;
  double c = 1.0;
  bool cut_on_iframe = true;
  // false: the window keeps sliding across cuts (every similarity enters it).
  // true: a cut clears the window and the next N similarities refill it.
  bool restart_window_on_cut = false;

  void validate() const;
};

// Pixelwise integer sum of a contiguous run of residual frames.
struct AccumulatedResidual {
  Plane32 sums;
  std::uint32_t first_index = 0;
  std::uint32_t last_index = 0;
  std::uint32_t member_count = 0;
  std::int64_t group_id = 0;

  bool operator==(const AccumulatedResidual&) const = default;
};

enum class Decision { warmup, accumulate, cut, flush, iframe };

const char* to_string(Decision d) noexcept;

struct TraceRow {
  std::uint32_t frame_index = 0;
  FrameType kind = FrameType::P;
  std::optional<double> similarity;
  std::optional<double> window_mean;
  Decision decision = Decision::warmup;
  std::int64_t group_id = -1;  // -1 for frames excluded from every group
};

// Streaming dynamic accumulation. Holds the previous residual and the
// running group sum only.
class DynamicAccumulator {
 public:
  using TraceSink = std::function<void(const TraceRow&)>;

  explicit DynamicAccumulator(AccumulatorConfig config, TraceSink trace = {});

  // Feeds the next residual. Returns the group completed by this frame, if
  // any. Frames must arrive in increasing frame_index order.
  std::optional<AccumulatedResidual> push(const ResidualFrame& frame);

  // Emits the final non-empty group. The accumulator is reset afterwards.
  std::optional<AccumulatedResidual> finish();

  const SimilarityWindow& window() const noexcept { return window_; }
  const AccumulatorConfig& config() const noexcept { return config_; }

 private:
  std::optional<AccumulatedResidual> take_group();
  void start_group(const ResidualFrame& frame);
  void add_to_group(const ResidualFrame& frame);
  void emit(const TraceRow& row) const {
    if (trace_) trace_(row);
  }

  AccumulatorConfig config_;
  TraceSink trace_;
  SimilarityWindow window_;
  std::optional<ResidualFrame> prev_;
  std::optional<AccumulatedResidual> group_;
  std::int64_t next_group_id_ = 0;
};

std::vector<AccumulatedResidual> run_dynamic_accumulation(
    std::span<const ResidualFrame> frames, const AccumulatorConfig& config,
    const DynamicAccumulator::TraceSink& trace = {});

// Pulls from `stream` lazily. If the stream throws, the groups completed so
// far are handed to `on_group` before the exception propagates.
void run_dynamic_accumulation(ResidualStream& stream, const AccumulatorConfig& config,
                              const std::function<void(AccumulatedResidual&&)>& on_group,
                              const DynamicAccumulator::TraceSink& trace = {});

// One single-member group per frame; the no-accumulation baseline.
AccumulatedResidual as_single_group(const ResidualFrame& frame, std::int64_t group_id);

// Affine map [min, max] -> [0, 255] with floor; constant 128 when min == max.
Plane8 normalize_accumulated(const AccumulatedResidual& acc);

struct ReductionStats {
  std::uint64_t input_frames = 0;
  std::uint64_t emitted_groups = 0;
  double reduction_ratio = 0.0;
  std::map<std::uint32_t, std::uint64_t> span_histogram;  // member_count -> groups
};

// reduction = 1 - emitted / input (0 when input is 0). Throws InvariantError
// when emitted > input.
ReductionStats reduction_stats(std::uint64_t input_frames, std::uint64_t emitted_groups,
                               std::span<const AccumulatedResidual> groups = {});

}  // namespace resacc
