#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "uninet/dataset.hpp"
#include "uninet/errors.hpp"

using namespace uninet;

namespace {

DatasetSchema vote_like() {
  return DatasetSchema::from_json(nlohmann::json::parse(R"({
    "name": "toy",
    "columns": [
      {"name": "party", "kind": "label", "categories": ["d", "r"]},
      {"name": "v1", "kind": "binary_categorical", "categories": ["n", "y"]},
      {"name": "colour", "kind": "multi_categorical", "categories": ["red", "green", "blue"]},
      {"name": "size", "kind": "numeric"},
      {"name": "id", "kind": "ignore"}
    ]
  })"));
}

Dataset parse(const std::string& text, const DatasetSchema& schema) {
  std::istringstream in(text);
  return parse_csv(in, schema, "toy.data");
}

Dataset balanced(std::size_t n, std::size_t classes = 2) {
  Dataset d;
  d.features = Matrix(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    d.labels.push_back(i % classes);
    d.features(i, 0) = static_cast<double>(i);
  }
  d.class_count = classes;
  d.feature_names = {"a", "b"};
  for (std::size_t c = 0; c < classes; ++c) d.class_names.push_back(std::to_string(c));
  return d;
}

}  // namespace

TEST(Load, Encodings) {
  const auto d = parse("d,y,red,1.5,17\nr,n,blue,-2,18\nd,?,?,?,19\n", vote_like());
  ASSERT_EQ(d.size(), 3u);
  ASSERT_EQ(d.feature_count(), 5u);
  EXPECT_EQ(d.feature_names,
            (std::vector<std::string>{"v1", "colour=red", "colour=green", "colour=blue", "size"}));
  const std::vector<double> r0{1, 1, -1, -1, 1.5}, r1{-1, -1, -1, 1, -2}, r2{0, -1, -1, -1, 0};
  EXPECT_EQ(std::vector<double>(d.features.row(0).begin(), d.features.row(0).end()), r0);
  EXPECT_EQ(std::vector<double>(d.features.row(1).begin(), d.features.row(1).end()), r1);
  EXPECT_EQ(std::vector<double>(d.features.row(2).begin(), d.features.row(2).end()), r2);
  EXPECT_EQ(d.labels, (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_EQ(d.class_count, 2u);
  EXPECT_TRUE(d.warnings.empty());
}

TEST(Load, OneHotSums) {
  const auto d = parse("d,y,red,1,0\nr,n,green,1,0\nd,n,blue,1,0\n", vote_like());
  for (std::size_t r = 0; r < d.size(); ++r) {
    EXPECT_EQ(d.features(r, 1) + d.features(r, 2) + d.features(r, 3), 2.0 - 3.0);
  }
}

TEST(Load, UnknownCategoryWarns) {
  const auto d = parse("d,maybe,purple,1,0\nr,y,red,2,0\n", vote_like());
  EXPECT_EQ(d.features(0, 0), 0.0);
  for (std::size_t c = 1; c <= 3; ++c) EXPECT_EQ(d.features(0, c), 0.0);
  EXPECT_EQ(d.warnings.size(), 2u);
  bool reported = false;
  for (const auto& line : d.encoding_report) reported |= line.find("maybe") != std::string::npos;
  EXPECT_TRUE(reported);
}

TEST(Load, MalformedRowNamesLine) {
  try {
    parse("d,y,red,1,0\nr,n,blue\n", vote_like());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("toy.data:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("d,y,red,abc,0\n", vote_like()), DataError);
  EXPECT_THROW(parse("x,y,red,1,0\n", vote_like()), DataError);
}

TEST(Load, LabelsByFirstOccurrenceWithoutCategories) {
  auto schema = vote_like();
  schema.columns[0].categories.clear();
  const auto d = parse("r,y,red,1,0\nd,n,red,1,0\nr,y,red,1,0\n", schema);
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"r", "d"}));
  EXPECT_EQ(d.labels, (std::vector<std::size_t>{0, 1, 0}));
}

TEST(Schema, Validation) {
  auto s = vote_like();
  s.columns[0].kind = ColumnKind::Numeric;
  EXPECT_THROW(s.validate(), DataError);
  s = vote_like();
  s.columns[1].categories = {"n"};
  EXPECT_THROW(s.validate(), DataError);
}

TEST(Load, ShippedSchemasParse) {
  const std::filesystem::path dir = UNINET_DATA_DIR;
  for (const char* name : {"breast-cancer", "house-votes-84", "kr-vs-kp", "pima-indians-diabetes"}) {
    const auto schema = DatasetSchema::load(dir / (std::string(name) + ".schema.json"));
    EXPECT_NO_THROW(schema.validate());
    const auto data_file = dir / (std::string(name) + ".data");
    if (!std::filesystem::exists(data_file)) continue;
    const auto a = load_csv(data_file, schema);
    const auto b = load_csv(data_file, schema);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_GE(a.class_count, 2u);
  }
}

TEST(Load, VoteFileEncoding) {
  const std::filesystem::path dir = UNINET_DATA_DIR;
  const auto file = dir / "house-votes-84.data";
  if (!std::filesystem::exists(file)) GTEST_SKIP() << "house-votes-84.data not fetched";
  const auto d = load_csv(file, DatasetSchema::load(dir / "house-votes-84.schema.json"));
  EXPECT_EQ(d.size(), 435u);
  EXPECT_EQ(d.feature_count(), 16u);
  std::set<double> seen(d.features.data().begin(), d.features.data().end());
  EXPECT_EQ(seen, (std::set<double>{-1, 0, 1}));
}

TEST(WriteCsv, HeaderAndRows) {
  const auto d = parse("d,y,red,1.5,0\n", vote_like());
  std::ostringstream out;
  write_csv(d, out);
  EXPECT_EQ(out.str(),
            "v1,colour=red,colour=green,colour=blue,size,label\n1,1,-1,-1,1.5,0\n");
}

TEST(Split, StratifiedCounts) {
  const auto d = balanced(100);
  const auto s = split(d, 0.3, 7, true);
  EXPECT_EQ(s.test.size(), 30u);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.test.class_sizes(), (std::vector<std::size_t>{15, 15}));
  const auto again = split(d, 0.3, 7, true);
  EXPECT_EQ(s.test.features, again.test.features);
  const auto other = split(d, 0.3, 8, true);
  EXPECT_FALSE(s.test.features == other.test.features);
}

TEST(Split, PartitionsRows) {
  const auto d = balanced(57, 3);
  const auto s = split(d, 0.25, 3, true);
  std::multiset<double> ids;
  for (std::size_t r = 0; r < s.train.size(); ++r) ids.insert(s.train.features(r, 0));
  for (std::size_t r = 0; r < s.test.size(); ++r) ids.insert(s.test.features(r, 0));
  EXPECT_EQ(ids.size(), 57u);
  EXPECT_EQ(std::set<double>(ids.begin(), ids.end()).size(), 57u);
  const auto whole = d.class_sizes(), test = s.test.class_sizes();
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_LE(std::abs(static_cast<double>(test[c]) - 0.25 * whole[c]), 1.0);
  }
}

TEST(Split, Errors) {
  const auto d = balanced(10);
  EXPECT_THROW(split(d, 0.0, 1), ConfigError);
  EXPECT_THROW(split(d, 1.0, 1), ConfigError);
}

TEST(Split, SingletonClassStaysInTrain) {
  auto d = balanced(10);
  d.class_count = 3;
  d.class_names.push_back("2");
  d.labels[9] = 2;
  const auto s = split(d, 0.3, 1, true);
  EXPECT_EQ(s.train.class_sizes()[2], 1u);
  EXPECT_FALSE(s.warnings.empty());
}

TEST(Folds, Stratified) {
  const auto d = balanced(100);
  const auto folds = stratified_folds(d.labels, 2, 5, 3);
  std::vector<std::array<int, 2>> counts(5);
  for (std::size_t i = 0; i < folds.size(); ++i) ++counts[folds[i]][d.labels[i]];
  for (const auto& c : counts) {
    EXPECT_EQ(c[0], 10);
    EXPECT_EQ(c[1], 10);
  }
  EXPECT_EQ(folds, stratified_folds(d.labels, 2, 5, 3));
  EXPECT_THROW(stratified_folds(balanced(6).labels, 2, 5, 3), DataError);
  EXPECT_THROW(stratified_folds(d.labels, 2, 1, 3), ConfigError);
}

TEST(Synthetic, ConjunctionLabels) {
  const auto expr = LogicExpr::binary(1.0, LogicExpr::input(0), LogicExpr::input(1));
  const auto d = generate_synthetic(expr, 3, 1000, 0.0, 5);
  ASSERT_EQ(d.size(), 1000u);
  ASSERT_EQ(d.feature_count(), 3u);
  std::size_t ones = 0;
  for (std::size_t r = 0; r < d.size(); ++r) {
    const double x0 = (d.features(r, 0) + 1) / 2, x1 = (d.features(r, 1) + 1) / 2;
    EXPECT_EQ(d.labels[r], cut(x0 + x1 - 1) >= 0.5 ? 1u : 0u);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_LE(std::abs(d.features(r, c)), 1.0);
    ones += d.labels[r];
  }
  EXPECT_GT(ones, 50u);
  EXPECT_EQ(generate_synthetic(expr, 3, 1000, 0.0, 5).features, d.features);
}

TEST(Synthetic, NoiseFlipsSomeLabels) {
  const auto expr = LogicExpr::binary(0.5, LogicExpr::input(0), LogicExpr::input(1));
  const auto clean = generate_synthetic(expr, 2, 2000, 0.0, 9);
  const auto noisy = generate_synthetic(expr, 2, 2000, 0.1, 9);
  std::size_t flipped = 0;
  for (std::size_t r = 0; r < clean.size(); ++r) {
    const double x0 = (noisy.features(r, 0) + 1) / 2, x1 = (noisy.features(r, 1) + 1) / 2;
    flipped += noisy.labels[r] != (expr.evaluate(std::vector<double>{x0, x1}) >= 0.5);
  }
  EXPECT_NEAR(flipped / 2000.0, 0.1, 0.03);
}

TEST(Synthetic, Preconditions) {
  const auto expr = LogicExpr::binary(1.0, LogicExpr::input(0), LogicExpr::input(4));
  EXPECT_THROW(generate_synthetic(expr, 3, 10, 0.0, 1), ConfigError);
  const auto ok = LogicExpr::binary(1.0, LogicExpr::input(0), LogicExpr::input(1));
  EXPECT_THROW(generate_synthetic(ok, 2, 10, 0.5, 1), ConfigError);
}
