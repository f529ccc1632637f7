#include "resacc/classifier.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace resacc {

double chi2_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw FormatError("chi2: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || y[i] < 0.0) throw FormatError("chi2: negative feature value");
    const double s = x[i] + y[i];
    if (s == 0.0) continue;
    const double d = x[i] - y[i];
    sum += d * d / s;
  }
  return sum;
}

int LabeledDataset::label_id(const std::string& name) {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) return static_cast<int>(it - names_.begin());
  names_.push_back(name);
  return static_cast<int>(names_.size() - 1);
}

void LabeledDataset::add(const std::string& label, FeatureVector features) {
  add(label_id(label), std::move(features));
}

void LabeledDataset::add(int label, FeatureVector features) {
  if (label < 0) throw FormatError("dataset: negative label id");
  validate_features(features);
  if (!items_.empty() && features.dim() != dim())
    throw FormatError("dataset: nonuniform feature dimension");
  if (static_cast<std::size_t>(label) >= names_.size()) {
    for (auto i = names_.size(); i <= static_cast<std::size_t>(label); ++i)
      names_.push_back(std::to_string(i));
  }
  items_.push_back({label, std::move(features)});
}

Model::Model(LabeledDataset data, int k, std::string extractor_id)
    : data_(std::move(data)), k_(k), extractor_id_(std::move(extractor_id)) {
  if (data_.empty()) throw FormatError("model: empty dataset");
  if (k_ < 1 || static_cast<std::size_t>(k_) > data_.size())
    throw FormatError("model: k must be in [1, dataset size]");
  if (extractor_id_.find_first_of(" \t\n") != std::string::npos)
    throw FormatError("model: extractor id must not contain whitespace");
}

Model train(LabeledDataset dataset, int k, std::string extractor_id) {
  return Model(std::move(dataset), k, std::move(extractor_id));
}

Prediction Model::predict(const FeatureVector& probe) const {
  if (probe.dim() != dim()) throw FormatError("predict: probe dimension mismatch");
  const auto& items = data_.items();
  std::vector<std::pair<double, std::size_t>> dist(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    dist[i] = {chi2_distance(probe, items[i].features), i};
  const auto kk = static_cast<std::size_t>(k_);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());

  struct Tally {
    int votes = 0;
    double sum = 0.0;
  };
  std::map<int, Tally> tally;
  for (std::size_t i = 0; i < kk; ++i) {
    auto& t = tally[items[dist[i].second].label];
    ++t.votes;
    t.sum += dist[i].first;
  }
  auto best = tally.begin();
  for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
    const auto& a = it->second;
    const auto& b = best->second;
    if (a.votes > b.votes || (a.votes == b.votes && a.sum < b.sum)) best = it;
  }
  return {best->first, best->second.sum};
}

// RESACC-MODEL v1 dim=<D> k=<K>
// extractor <id>
// labels <L>
// <id> <name>            (L lines)
// exemplars <N>
// <label>,<v0>,...       (N lines)
void Model::save(std::ostream& out) const {
  out << "RESACC-MODEL v1 dim=" << dim() << " k=" << k_ << '\n';
  out << "extractor " << extractor_id_ << '\n';
  out << "labels " << label_names().size() << '\n';
  for (std::size_t i = 0; i < label_names().size(); ++i)
    out << i << ' ' << label_names()[i] << '\n';
  out << "exemplars " << data_.size() << '\n';
  for (const auto& e : data_.items()) {
    out << e.label;
    for (double v : e.features.values) out << ',' << format_double(v);
    out << '\n';
  }
}

Model Model::load(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw FormatError(std::string("model: missing ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("header");
  std::size_t dim = 0;
  int k = 0;
  {
    std::istringstream hs(line);
    std::string magic, version, dim_field, k_field;
    hs >> magic >> version >> dim_field >> k_field;
    if (magic != "RESACC-MODEL" || version != "v1")
      throw FormatError("model: unrecognized header '" + line + "'");
    if (dim_field.rfind("dim=", 0) != 0 || k_field.rfind("k=", 0) != 0)
      throw FormatError("model: malformed header '" + line + "'");
    dim = static_cast<std::size_t>(parse_double(dim_field.substr(4)));
    k = static_cast<int>(parse_double(k_field.substr(2)));
  }

  next_line("extractor");
  if (line.rfind("extractor ", 0) != 0) throw FormatError("model: expected extractor line");
  std::string extractor = line.substr(10);

  next_line("labels");
  if (line.rfind("labels ", 0) != 0) throw FormatError("model: expected labels line");
  const auto label_count = static_cast<std::size_t>(parse_double(line.substr(7)));
  std::vector<std::string> names(label_count);
  for (std::size_t i = 0; i < label_count; ++i) {
    next_line("label name");
    const auto space = line.find(' ');
    if (space == std::string::npos) throw FormatError("model: malformed label line");
    const auto id = static_cast<std::size_t>(parse_double(line.substr(0, space)));
    if (id != i) throw FormatError("model: label ids must be sequential");
    names[i] = line.substr(space + 1);
  }

  next_line("exemplars");
  if (line.rfind("exemplars ", 0) != 0) throw FormatError("model: expected exemplars line");
  const auto count = static_cast<std::size_t>(parse_double(line.substr(10)));
  LabeledDataset data;
  data.set_label_names(names);
  for (std::size_t i = 0; i < count; ++i) {
    next_line("exemplar");
    std::string_view rest(line);
    auto comma = rest.find(',');
    const int label = static_cast<int>(parse_double(rest.substr(0, comma)));
    if (label < 0 || static_cast<std::size_t>(label) >= label_count)
      throw FormatError("model: exemplar label out of range");
    FeatureVector fv;
    while (comma != std::string_view::npos) {
      rest.remove_prefix(comma + 1);
      comma = rest.find(',');
      fv.values.push_back(parse_double(rest.substr(0, comma)));
    }
    if (fv.dim() != dim) throw FormatError("model: exemplar dimension does not match header");
    data.add(label, std::move(fv));
  }
  return Model(std::move(data), k, std::move(extractor));
}

}  // namespace resacc
