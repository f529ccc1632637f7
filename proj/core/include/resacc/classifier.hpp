#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "resacc/features.hpp"

namespace resacc {

// sum_i (x_i - y_i)^2 / (x_i + y_i); dims with x_i + y_i == 0 contribute 0.
// Throws FormatError on dimension mismatch or negative entries.
double chi2_distance(std::span<const double> x, std::span<const double> y);
inline double chi2_distance(const FeatureVector& x, const FeatureVector& y) {
  return chi2_distance(x.values, y.values);
}

struct Exemplar {
  int label = 0;
  FeatureVector features;

  bool operator==(const Exemplar&) const = default;
};

class LabeledDataset {
 public:
  // Label ids are assigned in first-seen order.
  int label_id(const std::string& name);
  void add(const std::string& label, FeatureVector features);
  void add(int label, FeatureVector features);

  const std::vector<std::string>& label_names() const noexcept { return names_; }
  const std::vector<Exemplar>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t dim() const noexcept { return items_.empty() ? 0 : items_.front().features.dim(); }

  void set_label_names(std::vector<std::string> names) { names_ = std::move(names); }

 private:
  std::vector<std::string> names_;
  std::vector<Exemplar> items_;
};

struct Prediction {
  int label = 0;
  double score = 0.0;  // summed chi2 distance of the winning label's neighbors

  bool operator==(const Prediction&) const = default;
};

// k-nearest-neighbour model over chi2 distance. Immutable once built.
class Model {
 public:
  Model(LabeledDataset data, int k, std::string extractor_id);

  std::size_t dim() const noexcept { return data_.dim(); }
  int k() const noexcept { return k_; }
  const std::string& extractor_id() const noexcept { return extractor_id_; }
  const std::vector<std::string>& label_names() const noexcept { return data_.label_names(); }
  const LabeledDataset& data() const noexcept { return data_; }

  // Neighbours ordered by (distance, insertion index). Majority label wins;
  // ties go to the smaller summed distance, then the lower label id.
  Prediction predict(const FeatureVector& probe) const;

  // Text format, see README.
  void save(std::ostream& out) const;
  static Model load(std::istream& in);

 private:
  LabeledDataset data_;
  int k_;
  std::string extractor_id_;
};

// Throws FormatError on an empty dataset, nonuniform dimensions, or k outside
// [1, size].
Model train(LabeledDataset dataset, int k, std::string extractor_id = "grid-gradient-4x4x8");

}  // namespace resacc
