#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "output_file.hpp"
#include "resacc/parallel.hpp"
#include "resacc/partial_decoder.hpp"
#include "resacc/pgm.hpp"
#include "resacc/synthgen.hpp"

namespace fs = std::filesystem;

namespace resacc::pipeline {

void PipelineConfig::validate() const {
  encoder.validate();
  accumulator.validate();
  if (partitions < 1) throw FormatError("--partitions must be >= 1");
  if (k < 1) throw FormatError("--k must be >= 1");
}

std::vector<Frame> load_frames(const fs::path& source) {
  if (source.extension() == ".clip") {
    std::ifstream in(source);
    if (!in) throw Error("cannot open " + source.string());
    try {
      return generate(parse_clip_spec(in));
    } catch (const FormatError& e) {
      throw FormatError(source.string() + ": " + e.what());
    }
  }
  return ingest_frames(source.string());
}

std::vector<std::uint8_t> load_or_encode(const fs::path& source, const EncoderConfig& encoder) {
  if (source.extension() == ".crv") {
    MappedFile file(source);
    auto bytes = file.bytes();
    return {bytes.begin(), bytes.end()};
  }
  const auto frames = load_frames(source);
  return encode(frames, encoder);
}

ClipFeatures featurize_stream(std::span<const std::uint8_t> crv, const AccumulatorConfig& config,
                              bool accumulate, const DynamicAccumulator::TraceSink& trace,
                              bool keep_groups) {
  ClipFeatures out;
  auto on_group = [&](AccumulatedResidual&& g) {
    out.rows.push_back({g.group_id, g.first_index, g.last_index,
                        extract_features(normalize_accumulated(g))});
    if (keep_groups) out.groups.push_back(std::move(g));
  };
  ResidualStream stream(crv);
  if (accumulate) {
    std::uint64_t frames = 0;
    auto counting_trace = [&](const TraceRow& row) {
      if (row.decision != Decision::flush) ++frames;
      if (trace) trace(row);
    };
    run_dynamic_accumulation(stream, config, on_group, counting_trace);
    out.input_frames = frames;
  } else {
    std::int64_t next_id = 0;
    while (auto frame = stream.next()) {
      ++out.input_frames;
      if (config.cut_on_iframe && frame->kind == FrameType::I) continue;
      on_group(as_single_group(*frame, next_id++));
    }
  }
  return out;
}

ClipPrediction predict_clip(const Model& model, std::span<const FeatureRow> rows, int partitions) {
  if (rows.empty()) throw FormatError("predict: clip has no feature rows");
  std::vector<FeatureVector> matrix;
  matrix.reserve(rows.size());
  for (const auto& r : rows) matrix.push_back(r.features);
  const auto pooled = pot_pool(matrix, partitions);
  ClipPrediction out;
  std::vector<int> labels;
  std::vector<double> scores;
  for (std::size_t p = 0; p < pooled.size(); ++p) {
    const auto pred = model.predict(pooled[p]);
    out.decisions.push_back({static_cast<int>(p), pred.label, pred.score});
    labels.push_back(pred.label);
    scores.push_back(pred.score);
  }
  out.label = partition_and_vote(labels, scores);
  return out;
}

void add_training_clip(LabeledDataset& dataset, const std::string& label,
                       std::span<const FeatureRow> rows, int partitions) {
  if (rows.empty()) throw FormatError("train: clip has no feature rows");
  std::vector<FeatureVector> matrix;
  matrix.reserve(rows.size());
  for (const auto& r : rows) matrix.push_back(r.features);
  for (auto& v : pot_pool(matrix, partitions)) dataset.add(label, std::move(v));
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw FormatError("not a boolean: '" + v + "'");
}

}  // namespace

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  Manifest m;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#set ", 0) == 0) {
      const auto kv = line.substr(5);
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected #set key=value");
      m.settings[kv.substr(0, eq)] = kv.substr(eq + 1);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (!header_seen) {
      if (cells != std::vector<std::string>{"clip", "label", "split", "source"})
        throw FormatError(path.string() + ": header must be clip,label,split,source");
      header_seen = true;
      continue;
    }
    if (cells.size() != 4)
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 4 columns");
    if (cells[2] != "train" && cells[2] != "test" && cells[2] != "none")
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": split must be train, test or none");
    fs::path source(cells[3]);
    if (source.is_relative()) source = base / source;
    m.entries.push_back({cells[0], cells[1], cells[2], source});
  }
  if (!header_seen) throw FormatError(path.string() + ": missing header");
  return m;
}

void write_manifest(std::ostream& out, const Manifest& m) {
  for (const auto& [k, v] : m.settings) out << "#set " << k << '=' << v << '\n';
  out << "clip,label,split,source\n";
  for (const auto& e : m.entries)
    out << e.clip << ',' << e.label << ',' << e.split << ',' << e.source.generic_string() << '\n';
}

void apply_settings(const std::map<std::string, std::string>& settings, PipelineConfig& config,
                    const std::vector<std::string>& explicit_keys) {
  auto as_int = [](const std::string& v) { return static_cast<int>(parse_double(v)); };
  for (const auto& [key, value] : settings) {
    if (std::find(explicit_keys.begin(), explicit_keys.end(), key) != explicit_keys.end()) continue;
    if (key == "qscale") config.encoder.qscale = as_int(value);
    else if (key == "gop") config.encoder.gop_size = as_int(value);
    else if (key == "search_range") config.encoder.search_range = as_int(value);
    else if (key == "window_size") config.accumulator.window_size = as_int(value);
    else if (key == "sim_c") config.accumulator.c = parse_double(value);
    else if (key == "cut_on_iframe") config.accumulator.cut_on_iframe = parse_bool(value);
    else if (key == "restart_window") config.accumulator.restart_window_on_cut = parse_bool(value);
    else if (key == "partitions") config.partitions = as_int(value);
    else if (key == "k") config.k = as_int(value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_double(value));
    else throw FormatError("manifest: unknown setting '" + key + "'");
  }
}

// ---------------------------------------------------------------------------
// Trace CSV

void write_trace_header(std::ostream& out) {
  out << "frame_index,kind,similarity,window_mean,decision,group_id\n";
}

void write_trace_row(std::ostream& out, const TraceRow& row) {
  out << row.frame_index << ',' << to_string(row.kind) << ','
      << (row.similarity ? format_double(*row.similarity) : std::string()) << ','
      << (row.window_mean ? format_double(*row.window_mean) : std::string()) << ','
      << to_string(row.decision) << ',' << row.group_id << '\n';
}

ReductionStats reduction_from_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("trace: missing header");
  std::uint64_t frames = 0;
  std::set<std::int64_t> groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 6) throw FormatError("trace: expected 6 columns");
    if (cells[4] == "flush") continue;
    ++frames;
    const auto id = static_cast<std::int64_t>(parse_double(cells[5]));
    if (id >= 0) groups.insert(id);
  }
  return reduction_stats(frames, groups.size());
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct ClipWork {
  std::vector<std::uint8_t> crv;
  ClipFeatures accumulated;
  ClipFeatures frame_by_frame;
  std::uint64_t groups = 0;
  std::string trace;
};

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (auto& ch : out)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.'))
      ch = '_';
  return out;
}

}  // namespace

EvaluationResult evaluate(const Manifest& manifest, const PipelineConfig& config,
                          const EvaluateOptions& options) {
  config.validate();
  if (manifest.entries.empty()) throw FormatError("manifest lists no clips");
  const auto& entries = manifest.entries;
  std::vector<ClipWork> work(entries.size());

  // Classification runs only when the manifest has both splits; otherwise
  // features are never needed.
  const bool has_train = std::any_of(entries.begin(), entries.end(),
                                     [](const auto& e) { return e.split == "train"; });
  const bool has_test = std::any_of(entries.begin(), entries.end(),
                                    [](const auto& e) { return e.split == "test"; });
  const bool classify = has_train && has_test;

  parallel_for(entries.size(), options.threads, [&](std::size_t i) {
    auto& w = work[i];
    w.crv = load_or_encode(entries[i].source, config.encoder);
    std::ostringstream trace;
    write_trace_header(trace);
    auto sink = [&](const TraceRow& row) { write_trace_row(trace, row); };
    if (classify) {
      w.accumulated = featurize_stream(w.crv, config.accumulator, true, sink);
      w.frame_by_frame = featurize_stream(w.crv, config.accumulator, false);
      w.groups = w.accumulated.rows.size();
    } else {
      ResidualStream stream(w.crv);
      run_dynamic_accumulation(
          stream, config.accumulator, [&](AccumulatedResidual&&) { ++w.groups; },
          [&](const TraceRow& row) {
            if (row.decision != Decision::flush) ++w.accumulated.input_frames;
            sink(row);
          });
    }
    w.trace = trace.str();
  });

  EvaluationResult result;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ClipResult c;
    c.clip = entries[i].clip;
    c.label = entries[i].label;
    c.split = entries[i].split;
    c.frames = work[i].accumulated.input_frames;
    c.groups = work[i].groups;
    result.input_frames += c.frames;
    result.accumulated_frames += c.groups;
    result.clips.push_back(std::move(c));
  }
  result.reduction_ratio =
      reduction_stats(result.input_frames, result.accumulated_frames).reduction_ratio;

  if (options.trace_dir) {
    fs::create_directories(*options.trace_dir);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      OutputFile f(*options.trace_dir / (sanitize(entries[i].clip) + ".csv"));
      f.stream() << work[i].trace;
      f.commit();
    }
  }

  if (classify) {
    auto run_mode = [&](const char* mode, ClipFeatures ClipWork::*member,
                        std::optional<std::string> ClipResult::*slot) {
      LabeledDataset data;
      for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].split == "train")
          add_training_clip(data, entries[i].label, (work[i].*member).rows, config.partitions);
      const Model model = train(std::move(data), config.k);
      if (result.labels.empty()) result.labels = model.label_names();
      int correct = 0;
      int total = 0;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].split != "test") continue;
        const auto pred = predict_clip(model, (work[i].*member).rows, config.partitions);
        const auto& name = model.label_names()[static_cast<std::size_t>(pred.label)];
        result.clips[i].*slot = name;
        ++result.confusion[mode][entries[i].label][name];
        ++total;
        if (name == entries[i].label) ++correct;
      }
      return static_cast<double>(correct) / total;
    };
    result.accuracy_accumulated =
        run_mode("accumulated", &ClipWork::accumulated, &ClipResult::predicted_accumulated);
    result.accuracy_frame_by_frame = run_mode("frame_by_frame", &ClipWork::frame_by_frame,
                                              &ClipResult::predicted_frame_by_frame);
  }

  // Single-threaded residual extraction + accumulation throughput.
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t frames = 0;
  std::uint64_t groups = 0;
  for (const auto& w : work) {
    ResidualStream stream(w.crv);
    DynamicAccumulator acc(config.accumulator);
    while (auto frame = stream.next()) {
      ++frames;
      if (acc.push(*frame)) ++groups;
    }
    if (acc.finish()) ++groups;
  }
  const auto stop = std::chrono::steady_clock::now();
  if (groups != result.accumulated_frames)
    throw InvariantError("throughput pass disagrees with evaluation pass");
  result.throughput_seconds = std::chrono::duration<double>(stop - start).count();
  result.throughput_fps =
      result.throughput_seconds > 0 ? static_cast<double>(frames) / result.throughput_seconds : 0.0;
  return result;
}

void write_evaluation(const fs::path& out_dir, const EvaluationResult& r,
                      const PipelineConfig& config) {
  fs::create_directories(out_dir);
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  {
    OutputFile f(out_dir / "summary.csv");
    auto& o = f.stream();
    o << "metric,value\n"
      << "clips," << r.clips.size() << '\n'
      << "input_frames," << r.input_frames << '\n'
      << "accumulated_frames," << r.accumulated_frames << '\n'
      << "reduction_ratio," << format_double(r.reduction_ratio) << '\n'
      << "accuracy_accumulated," << opt(r.accuracy_accumulated) << '\n'
      << "accuracy_frame_by_frame," << opt(r.accuracy_frame_by_frame) << '\n'
      << "window_size," << config.accumulator.window_size << '\n'
      << "sim_c," << format_double(config.accumulator.c) << '\n'
      << "qscale," << config.encoder.qscale << '\n'
      << "gop," << config.encoder.gop_size << '\n'
      << "search_range," << config.encoder.search_range << '\n'
      << "partitions," << config.partitions << '\n'
      << "k," << config.k << '\n';
    f.commit();
  }
  {
    OutputFile f(out_dir / "clips.csv");
    auto& o = f.stream();
    o << "clip,label,split,frames,groups,reduction_ratio,predicted_accumulated,"
         "predicted_frame_by_frame\n";
    for (const auto& c : r.clips)
      o << c.clip << ',' << c.label << ',' << c.split << ',' << c.frames << ',' << c.groups << ','
        << format_double(reduction_stats(c.frames, c.groups).reduction_ratio) << ','
        << c.predicted_accumulated.value_or("") << ',' << c.predicted_frame_by_frame.value_or("")
        << '\n';
    f.commit();
  }
  {
    OutputFile f(out_dir / "confusion.csv");
    auto& o = f.stream();
    o << "mode,actual,predicted,count\n";
    for (const auto& [mode, rows] : r.confusion)
      for (const auto& actual : r.labels)
        for (const auto& predicted : r.labels) {
          int n = 0;
          if (auto it = rows.find(actual); it != rows.end())
            if (auto jt = it->second.find(predicted); jt != it->second.end()) n = jt->second;
          o << mode << ',' << actual << ',' << predicted << ',' << n << '\n';
        }
    f.commit();
  }
  {
    OutputFile f(out_dir / "throughput.csv");
    auto& o = f.stream();
    o << "stage,frames,seconds,frames_per_second\n"
      << "residual_extraction+accumulation," << r.input_frames << ','
      << format_double(r.throughput_seconds) << ',' << format_double(r.throughput_fps) << '\n';
    f.commit();
  }
}

}  // namespace resacc::pipeline
