#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resacc/accumulator.hpp"
#include "resacc/classifier.hpp"
#include "resacc/codec.hpp"
#include "resacc/features.hpp"

namespace resacc::pipeline {

struct PipelineConfig {
  EncoderConfig encoder;
  AccumulatorConfig accumulator;
  int partitions = 8;
  int k = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

// Frames of a clip source: a .clip spec (generated), or anything
// ingest_frames accepts.
std::vector<Frame> load_frames(const std::filesystem::path& source);

// Encoded bytes of a source; .crv files are read as-is.
std::vector<std::uint8_t> load_or_encode(const std::filesystem::path& source,
                                         const EncoderConfig& encoder);

struct ClipFeatures {
  std::vector<FeatureRow> rows;
  std::uint64_t input_frames = 0;
  std::vector<AccumulatedResidual> groups;  // only filled when requested
};

// Partial decode -> (optional) dynamic accumulation -> features.
// `accumulate == false` treats every residual frame as its own group.
ClipFeatures featurize_stream(std::span<const std::uint8_t> crv, const AccumulatorConfig& config,
                              bool accumulate, const DynamicAccumulator::TraceSink& trace = {},
                              bool keep_groups = false);

struct PartitionDecision {
  int partition = 0;
  int label = 0;
  double score = 0.0;
};

struct ClipPrediction {
  std::vector<PartitionDecision> decisions;
  int label = 0;
};

// Pools the clip's rows into `partitions` segments, classifies each and votes.
ClipPrediction predict_clip(const Model& model, std::span<const FeatureRow> rows, int partitions);

// Adds the clip's pooled partition vectors to `dataset` under `label`.
void add_training_clip(LabeledDataset& dataset, const std::string& label,
                       std::span<const FeatureRow> rows, int partitions);

struct ManifestEntry {
  std::string clip;
  std::string label;
  std::string split;  // train | test | none
  std::filesystem::path source;
};

// CSV with header "clip,label,split,source"; sources are resolved relative to
// the manifest directory. Lines "#set key=value" carry pipeline settings.
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::map<std::string, std::string> settings;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const Manifest& manifest);

// Applies "#set" settings; keys listed in `explicit_keys` are left alone.
void apply_settings(const std::map<std::string, std::string>& settings, PipelineConfig& config,
                    const std::vector<std::string>& explicit_keys);

struct ClipResult {
  std::string clip;
  std::string label;
  std::string split;
  std::uint64_t frames = 0;
  std::uint64_t groups = 0;
  std::optional<std::string> predicted_accumulated;
  std::optional<std::string> predicted_frame_by_frame;
};

struct EvaluationResult {
  std::vector<ClipResult> clips;
  std::vector<std::string> labels;  // class names, training order
  std::uint64_t input_frames = 0;
  std::uint64_t accumulated_frames = 0;
  double reduction_ratio = 0.0;
  std::optional<double> accuracy_accumulated;
  std::optional<double> accuracy_frame_by_frame;
  // confusion[mode][actual][predicted]
  std::map<std::string, std::map<std::string, std::map<std::string, int>>> confusion;
  double throughput_seconds = 0.0;
  double throughput_fps = 0.0;
};

struct EvaluateOptions {
  unsigned threads = 1;
  // Per-clip accumulation traces are written here when set.
  std::optional<std::filesystem::path> trace_dir;
};

EvaluationResult evaluate(const Manifest& manifest, const PipelineConfig& config,
                          const EvaluateOptions& options = {});

// summary.csv, clips.csv, confusion.csv (deterministic) and throughput.csv
// (wall clock) under `out_dir`.
void write_evaluation(const std::filesystem::path& out_dir, const EvaluationResult& result,
                      const PipelineConfig& config);

// Trace CSV: frame_index,kind,similarity,window_mean,decision,group_id.
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRow& row);

// Recomputes (input frames, groups) from a trace CSV.
ReductionStats reduction_from_trace(std::istream& in);

}  // namespace resacc::pipeline
