#include <resacc/classifier.hpp>
#include <resacc/errors.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace resacc {
namespace {

FeatureVector random_vec(std::mt19937_64& rng, std::size_t dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  FeatureVector v;
  for (std::size_t i = 0; i < dim; ++i) v.values.push_back(u(rng));
  return v;
}

TEST(Chi2, Examples) {
  std::vector<double> a{1, 0}, b{0, 1};
  EXPECT_EQ(chi2_distance(a, b), 2.0);
  EXPECT_EQ(chi2_distance(a, a), 0.0);
  std::vector<double> z{0, 0};
  EXPECT_EQ(chi2_distance(z, z), 0.0);
  std::vector<double> short_v{1};
  EXPECT_THROW(chi2_distance(a, short_v), FormatError);
  std::vector<double> neg{-1, 0};
  EXPECT_THROW(chi2_distance(a, neg), FormatError);
}

TEST(Chi2, Symmetric) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 1000; ++i) {
    auto x = random_vec(rng, 12, 0, 5), y = random_vec(rng, 12, 0, 5);
    ASSERT_EQ(chi2_distance(x, y), chi2_distance(y, x));
  }
}

LabeledDataset clusters(std::mt19937_64& rng, int classes, int per_class) {
  LabeledDataset d;
  for (int c = 0; c < classes; ++c)
    for (int i = 0; i < per_class; ++i) {
      auto v = random_vec(rng, 6, 0, 1);
      v.values[c % 6] += 50.0;
      d.add("class" + std::to_string(c), v);
    }
  return d;
}

TEST(Train, Basics) {
  std::mt19937_64 rng(52);
  auto m = train(clusters(rng, 3, 5), 3);
  EXPECT_EQ(m.data().size(), 15u);
  EXPECT_EQ(m.label_names().size(), 3u);
  EXPECT_THROW(train(clusters(rng, 3, 5), 0), FormatError);
  EXPECT_THROW(train(clusters(rng, 3, 5), 16), FormatError);
  EXPECT_THROW(train(LabeledDataset{}, 1), FormatError);
  LabeledDataset ragged;
  ragged.add("a", FeatureVector{{1.0}});
  EXPECT_THROW(ragged.add("a", FeatureVector{{1.0, 2.0}}), FormatError);
}

TEST(Predict, ExemplarAndClusters) {
  std::mt19937_64 rng(53);
  auto data = clusters(rng, 2, 6);
  auto probe = data.items()[3].features;
  auto m1 = train(data, 1);
  auto p = m1.predict(probe);
  EXPECT_EQ(p.label, 0);
  EXPECT_EQ(p.score, 0.0);
  auto m3 = train(data, 3);
  auto inside_b = random_vec(rng, 6, 0, 1);
  inside_b.values[1] += 50.0;
  EXPECT_EQ(m3.predict(inside_b).label, 1);
  EXPECT_THROW(m3.predict(FeatureVector{{1.0}}), FormatError);
}

TEST(Predict, TieRules) {
  // k = size with balanced classes: both labels get two votes; label 1 sits
  // closer to the probe.
  LabeledDataset d;
  d.add("far", FeatureVector{{10.0, 0.0}});
  d.add("far", FeatureVector{{10.0, 0.0}});
  d.add("near", FeatureVector{{1.0, 0.0}});
  d.add("near", FeatureVector{{1.0, 0.0}});
  auto m = train(d, 4);
  EXPECT_EQ(m.predict(FeatureVector{{0.0, 0.0}}).label, 1);
  // Equal distances and votes: lower label id wins.
  LabeledDataset e;
  e.add("a", FeatureVector{{0.0, 1.0}});
  e.add("b", FeatureVector{{1.0, 0.0}});
  auto me = train(e, 2);
  EXPECT_EQ(me.predict(FeatureVector{{0.0, 0.0}}).label, 0);
}

TEST(Model, SaveLoadRoundTrip) {
  std::mt19937_64 rng(54);
  auto data = clusters(rng, 3, 4);
  auto m = train(data, 3);
  std::stringstream ss;
  m.save(ss);
  EXPECT_EQ(ss.str().rfind("RESACC-MODEL v1 dim=6 k=3\n", 0), 0u);
  auto loaded = Model::load(ss);
  EXPECT_EQ(loaded.label_names(), m.label_names());
  EXPECT_EQ(loaded.extractor_id(), m.extractor_id());
  EXPECT_EQ(loaded.data().items(), m.data().items());
  for (int i = 0; i < 200; ++i) {
    auto probe = random_vec(rng, 6, 0, 60);
    ASSERT_EQ(loaded.predict(probe), m.predict(probe));
  }
  std::stringstream again;
  loaded.save(again);
  std::stringstream first;
  m.save(first);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Model, LoadRejectsGarbage) {
  std::stringstream bad("NOT-A-MODEL\n");
  EXPECT_THROW(Model::load(bad), FormatError);
  std::stringstream truncated("RESACC-MODEL v1 dim=2 k=1\nextractor x\nlabels 1\n0 a\nexemplars 2\n0,1,2\n");
  EXPECT_THROW(Model::load(truncated), FormatError);
}

TEST(Predict, OneNearestNeighbourSelfAccuracy) {
  std::mt19937_64 rng(55);
  LabeledDataset d;
  for (int i = 0; i < 40; ++i) d.add("c" + std::to_string(i % 4), random_vec(rng, 10, 0, 100));
  auto m = train(d, 1);
  for (const auto& ex : d.items()) ASSERT_EQ(m.predict(ex.features).label, ex.label);
}

}  // namespace
}  // namespace resacc
