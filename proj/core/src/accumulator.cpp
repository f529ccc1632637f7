#include "resacc/accumulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace resacc {

double similarity(const Plane16& prev, const Plane16& cur, double c) {
  if (prev.width() != cur.width() || prev.height() != cur.height())
    throw FormatError("similarity: dimension mismatch");
  if (!(c > 0.0) || !std::isfinite(c)) throw FormatError("similarity: c must be > 0");
  auto a = prev.data();
  auto b = cur.data();
  // |v| <= 32768, so every term fits in 2^30 and the sums stay exact in
  // int64 for any plausible frame size.
  std::int64_t cross = 0;
  std::int64_t energy = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t x = a[i];
    const std::int64_t y = b[i];
    cross += std::abs(x * y);
    energy += x * x + y * y;
  }
  return (2.0 * static_cast<double>(cross) + c) / (static_cast<double>(energy) + c);
}

SimilarityWindow::SimilarityWindow(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw FormatError("window size must be >= 1");
}

void SimilarityWindow::push(double value) {
  if (full()) entries_.pop_front();
  entries_.push_back(value);
}

double SimilarityWindow::mean() const {
  if (entries_.empty()) throw InvariantError("mean of an empty similarity window");
  const double ref = entries_.front();
  double offset = 0.0;
  for (double e : entries_) offset += e - ref;
  return ref + offset / static_cast<double>(entries_.size());
}

void AccumulatorConfig::validate() const {
  if (window_size < 1) throw FormatError("window_size must be >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw FormatError("similarity constant c must be > 0");
}

const char* to_string(Decision d) noexcept {
  switch (d) {
    case Decision::warmup: return "warmup";
    case Decision::accumulate: return "accumulate";
    case Decision::cut: return "cut";
    case Decision::flush: return "flush";
    case Decision::iframe: return "iframe";
  }
  return "?";
}

DynamicAccumulator::DynamicAccumulator(AccumulatorConfig config, TraceSink trace)
    : config_((config.validate(), config)),
      trace_(std::move(trace)),
      window_(config.window_size) {}

void DynamicAccumulator::start_group(const ResidualFrame& frame) {
  AccumulatedResidual g;
  g.sums = Plane32(frame.width(), frame.height());
  g.first_index = frame.frame_index;
  g.last_index = frame.frame_index;
  g.member_count = 0;
  g.group_id = next_group_id_++;
  group_ = std::move(g);
  add_to_group(frame);
}

void DynamicAccumulator::add_to_group(const ResidualFrame& frame) {
  auto& g = *group_;
  if (g.member_count >= (1u << 23))
    throw InvariantError("group exceeds 2^23 members; int32 sums could overflow");
  auto dst = g.sums.data();
  auto src = frame.values.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  g.last_index = frame.frame_index;
  ++g.member_count;
}

std::optional<AccumulatedResidual> DynamicAccumulator::take_group() {
  std::optional<AccumulatedResidual> out = std::move(group_);
  group_.reset();
  return out;
}

std::optional<AccumulatedResidual> DynamicAccumulator::push(const ResidualFrame& frame) {
  if (prev_) {
    if (frame.frame_index <= prev_->frame_index)
      throw InvariantError("residual frames out of order at index " +
                           std::to_string(frame.frame_index));
    if (frame.width() != prev_->width() || frame.height() != prev_->height())
      throw FormatError("residual frame dimensions changed mid-stream");
  }

  if (config_.cut_on_iframe && frame.kind == FrameType::I) {
    auto done = take_group();
    prev_.reset();
    window_.clear();
    emit({frame.frame_index, frame.kind, std::nullopt, std::nullopt, Decision::iframe, -1});
    return done;
  }

  std::optional<AccumulatedResidual> done;
  if (!prev_) {
    start_group(frame);
    emit({frame.frame_index, frame.kind, std::nullopt, std::nullopt, Decision::warmup,
          group_->group_id});
  } else {
    const double s = similarity(*prev_, frame, config_.c);
    if (!window_.full()) {
      window_.push(s);
      add_to_group(frame);
      emit({frame.frame_index, frame.kind, s, window_.mean(), Decision::warmup,
            group_->group_id});
    } else {
      const double mean = window_.mean();
      if (s >= mean) {
        add_to_group(frame);
        window_.push(s);
        emit({frame.frame_index, frame.kind, s, mean, Decision::accumulate, group_->group_id});
      } else {
        done = take_group();
        start_group(frame);
        if (config_.restart_window_on_cut)
          window_.clear();
        else
          window_.push(s);
        emit({frame.frame_index, frame.kind, s, mean, Decision::cut, group_->group_id});
      }
    }
  }
  prev_ = frame;
  return done;
}

std::optional<AccumulatedResidual> DynamicAccumulator::finish() {
  auto done = take_group();
  if (done)
    emit({done->last_index, prev_ ? prev_->kind : FrameType::P, std::nullopt, std::nullopt,
          Decision::flush, done->group_id});
  prev_.reset();
  window_.clear();
  return done;
}

std::vector<AccumulatedResidual> run_dynamic_accumulation(
    std::span<const ResidualFrame> frames, const AccumulatorConfig& config,
    const DynamicAccumulator::TraceSink& trace) {
  DynamicAccumulator acc(config, trace);
  std::vector<AccumulatedResidual> out;
  for (const auto& frame : frames)
    if (auto g = acc.push(frame)) out.push_back(std::move(*g));
  if (auto g = acc.finish()) out.push_back(std::move(*g));
  return out;
}

void run_dynamic_accumulation(ResidualStream& stream, const AccumulatorConfig& config,
                              const std::function<void(AccumulatedResidual&&)>& on_group,
                              const DynamicAccumulator::TraceSink& trace) {
  DynamicAccumulator acc(config, trace);
  for (;;) {
    std::optional<ResidualFrame> frame = stream.next();
    if (!frame) break;
    if (auto g = acc.push(*frame)) on_group(std::move(*g));
  }
  if (auto g = acc.finish()) on_group(std::move(*g));
}

AccumulatedResidual as_single_group(const ResidualFrame& frame, std::int64_t group_id) {
  AccumulatedResidual g;
  g.sums = Plane32(frame.width(), frame.height());
  auto dst = g.sums.data();
  auto src = frame.values.data();
  std::copy(src.begin(), src.end(), dst.begin());
  g.first_index = g.last_index = frame.frame_index;
  g.member_count = 1;
  g.group_id = group_id;
  return g;
}

Plane8 normalize_accumulated(const AccumulatedResidual& acc) {
  Plane8 out(acc.sums.width(), acc.sums.height(), 128);
  auto src = acc.sums.data();
  if (src.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(src.begin(), src.end());
  const std::int64_t lo = *lo_it;
  const std::int64_t hi = *hi_it;
  if (lo == hi) return out;
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<std::uint8_t>((src[i] - lo) * 255 / (hi - lo));
  return out;
}

ReductionStats reduction_stats(std::uint64_t input_frames, std::uint64_t emitted_groups,
                               std::span<const AccumulatedResidual> groups) {
  if (emitted_groups > input_frames)
    throw InvariantError("emitted group count exceeds input frame count");
  ReductionStats stats;
  stats.input_frames = input_frames;
  stats.emitted_groups = emitted_groups;
  stats.reduction_ratio =
      input_frames == 0 ? 0.0
                        : 1.0 - static_cast<double>(emitted_groups) / static_cast<double>(input_frames);
  for (const auto& g : groups) ++stats.span_histogram[g.member_count];
  return stats;
}

}  // namespace resacc
