#include <resacc/errors.hpp>
#include <resacc/features.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace resacc {
namespace {

constexpr int kCell = 1 + GridGradientExtractor::kBins;

TEST(Extract, ConstantMidGreyIsZero) {
  auto f = extract_features(Plane8(64, 48, 128));
  ASSERT_EQ(f.dim(), 144u);
  for (double v : f.values) EXPECT_EQ(v, 0.0);
}

TEST(Extract, VerticalEdgeFillsHorizontalGradientBin) {
  Plane8 p(32, 32, 40);
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) p(x, y) = 220;
  auto f = extract_features(p);
  for (int gy = 0; gy < 4; ++gy)
    for (int gx = 0; gx < 4; ++gx) {
      const double* cell = f.values.data() + (gy * 4 + gx) * kCell;
      const bool crossed = gx == 1 || gx == 2;
      EXPECT_DOUBLE_EQ(cell[1], crossed ? 1.0 : 0.0) << gx << "," << gy;
      for (int b = 2; b < kCell; ++b) EXPECT_EQ(cell[b], 0.0);
    }
  EXPECT_DOUBLE_EQ(f.values[0], 88.0);
  EXPECT_DOUBLE_EQ(f.values[3 * kCell], 92.0);
}

TEST(Extract, DimensionAndBounds) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto [w, h] : {std::pair{16, 16}, {35, 17}, {320, 240}, {3, 2}}) {
    Plane8 p(w, h);
    for (auto& v : p.data()) v = static_cast<std::uint8_t>(d(rng));
    auto f = extract_features(p);
    ASSERT_EQ(f.dim(), 144u);
    EXPECT_NO_THROW(validate_features(f));
    for (int c = 0; c < 16; ++c) EXPECT_LE(f.values[c * kCell], 127.0);
  }
  Plane8 black(16, 16, 0);
  EXPECT_EQ(extract_features(black).values[0], 127.0);
  EXPECT_THROW(extract_features(Plane8{}), FormatError);
}

std::vector<FeatureVector> column(std::initializer_list<double> vals) {
  std::vector<FeatureVector> rows;
  for (double v : vals) rows.push_back({{v}});
  return rows;
}

TEST(Pool, HandExample) {
  auto out = pot_pool(column({1, 5, 2, 2, 9, 0}), 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].values[0], 5);
  EXPECT_EQ(out[1].values[0], 2);
  EXPECT_EQ(out[2].values[0], 9);
}

TEST(Pool, UnevenAndShortInputs) {
  auto rows = column({1, 2, 3, 4, 5, 6, 7, 8});
  auto same = pot_pool(rows, 8);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(same[i], rows[i]);
  // 7 rows into 3: sizes 3, 2, 2.
  auto uneven = pot_pool(column({9, 1, 1, 8, 1, 1, 7}), 3);
  EXPECT_EQ(uneven[0].values[0], 9);
  EXPECT_EQ(uneven[1].values[0], 8);
  EXPECT_EQ(uneven[2].values[0], 7);
  auto few = pot_pool(column({4, 6}), 4);
  ASSERT_EQ(few.size(), 4u);
  EXPECT_EQ(few[0].values[0], 4);
  EXPECT_EQ(few[1].values[0], 6);
  EXPECT_EQ(few[3].values[0], 6);
  EXPECT_THROW(pot_pool({}, 8), FormatError);
}

TEST(Vote, Examples) {
  std::vector<int> same(8, 2);
  std::vector<double> zeros(8, 0.0);
  EXPECT_EQ(partition_and_vote(same, zeros), 2);
  // A = 0, B = 1, C = 2; A and B tie on votes, B has the smaller sum.
  std::vector<int> labels{0, 0, 0, 1, 1, 1, 2, 2};
  std::vector<double> scores{0.4, 0.4, 0.4, 0.2, 0.3, 0.3, 0.0, 0.0};
  EXPECT_EQ(partition_and_vote(labels, scores), 1);
  std::vector<int> one{5};
  std::vector<double> s1{3.0};
  EXPECT_EQ(partition_and_vote(one, s1), 5);
  std::vector<int> tie{3, 1};
  std::vector<double> eq{1.0, 1.0};
  EXPECT_EQ(partition_and_vote(tie, eq), 1);
  EXPECT_THROW(partition_and_vote({}, {}), FormatError);
}

TEST(FeatureCsv, RoundTrip) {
  std::vector<FeatureRow> rows;
  rows.push_back({0, 1, 4, {{0.1, 1.0 / 3.0, 127.0}}});
  rows.push_back({1, 5, 5, {{0.0, 2.5e-300, 5e-324}}});
  std::stringstream ss;
  write_feature_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, 37), "group_id,first_index,last_index,f0,f1");
  EXPECT_EQ(read_feature_csv(ss), rows);
}

TEST(FeatureCsv, Malformed) {
  std::stringstream bad("group_id,first_index,last_index,f0\n0,1,1,abc\n");
  EXPECT_THROW(read_feature_csv(bad), FormatError);
  std::stringstream ragged("group_id,first_index,last_index,f0,f1\n0,1,1,1\n");
  EXPECT_THROW(read_feature_csv(ragged), FormatError);
  std::stringstream neg("group_id,first_index,last_index,f0\n0,1,1,-1\n");
  EXPECT_THROW(read_feature_csv(neg), FormatError);
}

TEST(Doubles, ShortestRoundTrip) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    ASSERT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_THROW(parse_double("1.5x"), FormatError);
  EXPECT_THROW(parse_double(""), FormatError);
}

}  // namespace
}  // namespace resacc
