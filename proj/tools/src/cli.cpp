#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "output_file.hpp"
#include "pipeline.hpp"
#include "resacc/parallel.hpp"
#include "resacc/pgm.hpp"
#include "resacc/synthgen.hpp"

namespace fs = std::filesystem;

namespace resacc::cli {
namespace {

using pipeline::OutputFile;
using pipeline::PipelineConfig;

std::string numbered(const char* prefix, std::uint64_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04llu%s", prefix, static_cast<unsigned long long>(i), ext);
  return buf;
}

void write_pgm_file(const fs::path& path, const Plane8& plane) {
  OutputFile f(path, true);
  write_pgm(f.stream(), plane);
  f.commit();
}

// Flags shared between subcommands. Each add_* call records the option so
// evaluate can tell explicit flags from defaults.
struct Flags {
  PipelineConfig config;
  std::vector<std::pair<std::string, CLI::Option*>> tracked;

  void encoder(CLI::App* app) {
    tracked.emplace_back("qscale", app->add_option("--qscale", config.encoder.qscale,
                                                   "Quantizer step")->capture_default_str());
    tracked.emplace_back("gop", app->add_option("--gop", config.encoder.gop_size,
                                                "Frames per I-frame period")->capture_default_str());
    tracked.emplace_back("search_range",
                         app->add_option("--search-range", config.encoder.search_range,
                                         "Motion search range in pels (0-15)")
                             ->capture_default_str());
  }
  void accumulator(CLI::App* app) {
    tracked.emplace_back("window_size",
                         app->add_option("--window-size", config.accumulator.window_size,
                                         "Temporal window size N")->capture_default_str());
    tracked.emplace_back("sim_c", app->add_option("--sim-c", config.accumulator.c,
                                                  "Similarity stabilization constant")
                                      ->capture_default_str());
    tracked.emplace_back("cut_on_iframe",
                         app->add_option("--cut-on-iframe", config.accumulator.cut_on_iframe,
                                         "Cut before and exclude I-frames (true/false)")
                             ->capture_default_str());
    tracked.emplace_back("restart_window",
                         app->add_option("--restart-window", config.accumulator.restart_window_on_cut,
                                         "Clear the window after every cut (true/false)")
                             ->capture_default_str());
  }
  void classifier(CLI::App* app) {
    tracked.emplace_back("partitions", app->add_option("--partitions", config.partitions,
                                                       "Temporal partitions")->capture_default_str());
    tracked.emplace_back("k", app->add_option("--k", config.k, "Neighbours for k-NN")
                                  ->capture_default_str());
  }

  std::vector<std::string> explicit_keys() const {
    std::vector<std::string> keys;
    for (const auto& [key, opt] : tracked)
      if (opt->count() > 0) keys.push_back(key);
    return keys;
  }
};

std::vector<FeatureRow> read_features(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_feature_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// --- synth ------------------------------------------------------------------

int cmd_synth(const std::string& spec_path, const std::string& corpus, std::uint64_t seed,
              int count, const fs::path& out_dir, std::ostream& out) {
  if (spec_path.empty() == corpus.empty())
    throw CLI::ValidationError("synth", "exactly one of --spec or --corpus is required");
  fs::create_directories(out_dir);
  if (!spec_path.empty()) {
    const auto frames = pipeline::load_frames(spec_path);
    for (std::size_t i = 0; i < frames.size(); ++i)
      write_pgm_file(out_dir / numbered("frame", i, ".pgm"), frames[i].luma());
    out << "wrote " << frames.size() << " frames to " << out_dir.string() << '\n';
    return kExitOk;
  }

  std::vector<CorpusEntry> entries;
  pipeline::Manifest manifest;
  if (corpus == "actions") {
    entries = action_corpus(seed, count > 0 ? count : 10);
    manifest.settings = {{"search_range", "0"}, {"qscale", "8"}, {"gop", "250"},
                         {"window_size", "10"}, {"partitions", "8"}, {"k", "3"}};
  } else if (corpus == "surveillance") {
    entries = surveillance_corpus(seed, count > 0 ? count : 20);
    manifest.settings = {{"search_range", "0"}, {"qscale", "8"}, {"gop", "250"},
                         {"window_size", "10"}};
  } else {
    throw CLI::ValidationError("--corpus", "must be 'actions' or 'surveillance'");
  }
  manifest.settings["seed"] = std::to_string(seed);
  for (const auto& e : entries) {
    OutputFile f(out_dir / (e.name + ".clip"));
    write_clip_spec(f.stream(), e.spec);
    f.commit();
    manifest.entries.push_back({e.name, e.label, e.split, e.name + ".clip"});
  }
  OutputFile f(out_dir / "manifest.csv");
  pipeline::write_manifest(f.stream(), manifest);
  f.commit();
  out << "wrote " << entries.size() << " clip specs and manifest.csv to " << out_dir.string()
      << '\n';
  return kExitOk;
}

// --- encode / residuals / accumulate ----------------------------------------

int cmd_encode(const fs::path& input, const fs::path& output, const PipelineConfig& config,
               std::ostream& out) {
  config.encoder.validate();
  const auto frames = pipeline::load_frames(input);
  const auto bytes = encode(frames, config.encoder, configured_threads());
  OutputFile f(output, true);
  f.stream().write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()));
  f.commit();
  out << "encoded " << frames.size() << " frames (" << bytes.size() << " bytes) to "
      << output.string() << '\n';
  return kExitOk;
}

int cmd_residuals(const fs::path& input, const fs::path& out_dir, const std::string& format,
                  std::ostream& out) {
  if (format != "pgm" && format != "csv" && format != "both")
    throw CLI::ValidationError("--format", "must be pgm, csv or both");
  MappedFile file(input);
  ResidualStream stream(file.bytes());
  fs::create_directories(out_dir);
  std::optional<OutputFile> csv;
  if (format != "pgm") {
    csv.emplace(out_dir / "residuals.csv");
    csv->stream() << "frame_index,kind,min,max,energy,nonzero\n";
  }
  std::uint64_t n = 0;
  while (auto frame = stream.next()) {
    if (format != "csv")
      write_pgm_file(out_dir / numbered("residual", frame->frame_index, ".pgm"),
                     residual_to_display(frame->values));
    if (csv) {
      int lo = 0, hi = 0;
      std::int64_t energy = 0, nonzero = 0;
      for (auto v : frame->values.data()) {
        lo = std::min<int>(lo, v);
        hi = std::max<int>(hi, v);
        energy += std::int64_t(v) * v;
        nonzero += v != 0;
      }
      csv->stream() << frame->frame_index << ',' << to_string(frame->kind) << ',' << lo << ','
                    << hi << ',' << energy << ',' << nonzero << '\n';
    }
    ++n;
  }
  if (csv) csv->commit();
  out << "decoded " << n << " residual frames to " << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_accumulate(const fs::path& input, const fs::path& out_dir, bool trace,
                   const PipelineConfig& config, std::ostream& out) {
  config.validate();
  const auto bytes = pipeline::load_or_encode(input, config.encoder);
  fs::create_directories(out_dir);
  std::optional<OutputFile> trace_file;
  if (trace) {
    trace_file.emplace(out_dir / "trace.csv");
    pipeline::write_trace_header(trace_file->stream());
  }
  std::uint64_t frames = 0;
  std::vector<AccumulatedResidual> meta;  // sums dropped after export
  ResidualStream stream(bytes);
  run_dynamic_accumulation(
      stream, config.accumulator,
      [&](AccumulatedResidual&& g) {
        write_pgm_file(out_dir / numbered("acc", static_cast<std::uint64_t>(g.group_id), ".pgm"),
                       normalize_accumulated(g));
        g.sums = Plane32();
        meta.push_back(std::move(g));
      },
      [&](const TraceRow& row) {
        if (row.decision != Decision::flush) ++frames;
        if (trace_file) pipeline::write_trace_row(trace_file->stream(), row);
      });
  const auto stats = reduction_stats(frames, meta.size(), meta);
  {
    OutputFile f(out_dir / "stats.csv");
    f.stream() << "metric,value\n"
               << "input_frames," << stats.input_frames << '\n'
               << "emitted_groups," << stats.emitted_groups << '\n'
               << "reduction_ratio," << format_double(stats.reduction_ratio) << '\n'
               << "window_size," << config.accumulator.window_size << '\n';
    for (const auto& [members, count] : stats.span_histogram)
      f.stream() << "groups_with_" << members << "_members," << count << '\n';
    f.commit();
  }
  {
    OutputFile f(out_dir / "groups.csv");
    f.stream() << "group_id,first_index,last_index,member_count\n";
    for (const auto& g : meta)
      f.stream() << g.group_id << ',' << g.first_index << ',' << g.last_index << ','
                 << g.member_count << '\n';
    f.commit();
  }
  if (trace_file) trace_file->commit();
  out << "frames=" << stats.input_frames << " groups=" << stats.emitted_groups
      << " reduction=" << format_double(stats.reduction_ratio) << '\n';
  return kExitOk;
}

// --- featurize / train / predict --------------------------------------------

int cmd_featurize(const fs::path& input, const fs::path& output, bool no_accumulate,
                  const PipelineConfig& config, std::ostream& out) {
  config.validate();
  std::vector<FeatureRow> rows;
  if (fs::is_directory(input)) {
    // Previously exported accumulated planes, in file-name order.
    std::vector<fs::path> planes;
    for (const auto& entry : fs::directory_iterator(input))
      if (entry.path().extension() == ".pgm") planes.push_back(entry.path());
    std::sort(planes.begin(), planes.end());
    if (planes.empty()) throw Error(input.string() + ": no .pgm files");
    for (std::size_t i = 0; i < planes.size(); ++i) {
      const auto idx = static_cast<std::uint32_t>(i);
      rows.push_back({static_cast<std::int64_t>(i), idx, idx, extract_features(read_pgm(planes[i]))});
    }
  } else {
    const auto bytes = pipeline::load_or_encode(input, config.encoder);
    rows = pipeline::featurize_stream(bytes, config.accumulator, !no_accumulate).rows;
  }
  OutputFile f(output);
  write_feature_csv(f.stream(), rows);
  f.commit();
  out << "wrote " << rows.size() << " feature rows to " << output.string() << '\n';
  return kExitOk;
}

int cmd_train(const fs::path& labels_path, const fs::path& output, const PipelineConfig& config,
              std::ostream& out) {
  config.validate();
  std::ifstream in(labels_path);
  if (!in) throw Error("cannot open " + labels_path.string());
  LabeledDataset data;
  std::string line;
  int line_no = 0;
  int clips = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw FormatError(labels_path.string() + ":" + std::to_string(line_no) +
                        ": expected features_csv,label");
    fs::path features(line.substr(0, comma));
    const std::string label = line.substr(comma + 1);
    if (line_no == 1 && features == "features" && label == "label") continue;
    if (features.is_relative()) features = labels_path.parent_path() / features;
    pipeline::add_training_clip(data, label, read_features(features), config.partitions);
    ++clips;
  }
  const Model model = train(std::move(data), config.k);
  OutputFile f(output);
  model.save(f.stream());
  f.commit();
  out << "trained on " << clips << " clips (" << model.data().size() << " exemplars, "
      << model.label_names().size() << " classes)\n";
  return kExitOk;
}

int cmd_predict(const fs::path& features, const fs::path& model_path,
                const std::optional<fs::path>& output, const PipelineConfig& config,
                std::ostream& out) {
  config.validate();
  std::ifstream in(model_path);
  if (!in) throw Error("cannot open " + model_path.string());
  const Model model = Model::load(in);
  const auto rows = read_features(features);
  const auto pred = pipeline::predict_clip(model, rows, config.partitions);
  const auto& names = model.label_names();
  if (output) {
    OutputFile f(*output);
    f.stream() << "partition,label,score\n";
    for (const auto& d : pred.decisions)
      f.stream() << d.partition << ',' << names[d.label] << ',' << format_double(d.score) << '\n';
    f.stream() << "vote," << names[pred.label] << ",\n";
    f.commit();
  }
  out << names[pred.label] << '\n';
  return kExitOk;
}

// --- evaluate ----------------------------------------------------------------

int cmd_evaluate(const fs::path& manifest_path, const fs::path& out_dir, bool trace,
                 Flags& flags, std::ostream& out) {
  const auto manifest = pipeline::read_manifest(manifest_path);
  auto config = flags.config;
  pipeline::apply_settings(manifest.settings, config, flags.explicit_keys());
  pipeline::EvaluateOptions options;
  options.threads = configured_threads();
  if (trace) options.trace_dir = out_dir / "traces";
  const auto result = pipeline::evaluate(manifest, config, options);
  pipeline::write_evaluation(out_dir, result, config);
  out << "clips=" << result.clips.size() << " frames=" << result.input_frames
      << " accumulated=" << result.accumulated_frames
      << " reduction=" << format_double(result.reduction_ratio);
  if (result.accuracy_accumulated)
    out << " accuracy=" << format_double(*result.accuracy_accumulated)
        << " accuracy_frame_by_frame=" << format_double(*result.accuracy_frame_by_frame);
  out << " fps=" << format_double(result.throughput_fps) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"resacc: compressed-domain residual accumulation pipeline"};
  app.require_subcommand(1);
  Flags flags;

  std::string input, output, spec, corpus, format = "both", model, labels;
  fs::path out_dir;
  std::uint64_t seed = 0;
  int count = 0;
  bool trace = false;
  bool no_accumulate = false;

  auto* synth = app.add_subcommand("synth", "Generate synthetic clips (PGM frames or a corpus)");
  synth->add_option("--spec", spec, "Clip spec file");
  synth->add_option("--corpus", corpus, "Built-in corpus: actions | surveillance");
  synth->add_option("--seed", seed, "Corpus seed")->capture_default_str();
  synth->add_option("--clips", count, "Clips (per class for actions)");
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* enc = app.add_subcommand("encode", "Encode a frame sequence to a .crv stream");
  enc->add_option("--input", input, "PGM directory/pattern or .clip spec")->required();
  enc->add_option("--output", output, "Output .crv file")->required();
  flags.encoder(enc);

  auto* res = app.add_subcommand("residuals", "Partially decode residuals from a .crv stream");
  res->add_option("--input", input, ".crv file")->required();
  res->add_option("--out-dir", out_dir, "Output directory")->required();
  res->add_option("--format", format, "pgm | csv | both")->capture_default_str();

  auto* acc = app.add_subcommand("accumulate", "Dynamic residual accumulation");
  acc->add_option("--input", input, ".crv file (or frames, encoded on the fly)")->required();
  acc->add_option("--out-dir", out_dir, "Output directory")->required();
  acc->add_flag("--trace", trace, "Write the per-frame decision trace");
  flags.encoder(acc);
  flags.accumulator(acc);

  auto* feat = app.add_subcommand("featurize", "Feature vectors per accumulated frame");
  feat->add_option("--input", input, ".crv, frame source, or directory of accumulated PGMs")
      ->required();
  feat->add_option("--output", output, "Features CSV")->required();
  feat->add_flag("--no-accumulate", no_accumulate, "One feature row per residual frame");
  flags.encoder(feat);
  flags.accumulator(feat);

  auto* tr = app.add_subcommand("train", "Train a chi2 k-NN model");
  tr->add_option("--labels", labels, "CSV of features_csv,label rows")->required();
  tr->add_option("--output", output, "Model file")->required();
  flags.classifier(tr);

  std::optional<fs::path> decisions;
  auto* pr = app.add_subcommand("predict", "Classify one clip by partition voting");
  pr->add_option("--features", input, "Features CSV")->required();
  pr->add_option("--model", model, "Model file")->required();
  pr->add_option("--output", decisions, "Per-partition decisions CSV");
  flags.classifier(pr);

  auto* ev = app.add_subcommand("evaluate", "Run a corpus manifest end to end");
  ev->add_option("--manifest", input, "Manifest CSV")->required();
  ev->add_option("--out-dir", out_dir, "Output directory")->required();
  ev->add_flag("--trace", trace, "Write per-clip decision traces");
  ev->add_option("--seed", seed, "Recorded for provenance");
  flags.encoder(ev);
  flags.accumulator(ev);
  flags.classifier(ev);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();  // program name
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(spec, corpus, seed, count, out_dir, out);
    if (*enc) return cmd_encode(input, output, flags.config, out);
    if (*res) return cmd_residuals(input, out_dir, format, out);
    if (*acc) return cmd_accumulate(input, out_dir, trace, flags.config, out);
    if (*feat) return cmd_featurize(input, output, no_accumulate, flags.config, out);
    if (*tr) return cmd_train(labels, output, flags.config, out);
    if (*pr) return cmd_predict(input, model, decisions, flags.config, out);
    if (*ev) return cmd_evaluate(input, out_dir, trace, flags, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace resacc::cli
