#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "uninet/benchmark.hpp"
#include "uninet/errors.hpp"

using namespace uninet;

namespace fs = std::filesystem;

TEST(Manifest, ShippedFile) {
  const auto m = BenchmarkManifest::load(fs::path(UNINET_DATA_DIR) / "benchmarks.json");
  ASSERT_EQ(m.datasets.size(), 4u);
  EXPECT_FALSE(m.protocol.empty());
  const auto& diabetes = m.datasets[1];
  EXPECT_EQ(diabetes.name, "Diabetes");
  EXPECT_EQ(diabetes.reference_fuzzy, 0.28);
  EXPECT_EQ(diabetes.reference_dnn, 0.26);
  EXPECT_THROW(BenchmarkManifest::load("no/such/manifest.json"), DataError);
}

TEST(BenchmarkCsv, GoldenSkippedReport) {
  const auto m = BenchmarkManifest::load(fs::path(UNINET_DATA_DIR) / "benchmarks.json");
  std::vector<BenchmarkRow> rows;
  for (const auto& e : m.datasets) {
    rows.push_back(run_benchmark(e, fs::temp_directory_path() / "uninet_empty_dir",
                                 UNINET_DATA_DIR, {}));
  }
  std::ostringstream out;
  write_benchmark_csv(rows, out);
  EXPECT_EQ(out.str(),
            "dataset,fuzzy_rate,dnn_rate,reference_fuzzy,reference_dnn,expression,faithfulness\n"
            "Breast cancer,SKIPPED,SKIPPED,0.25,0.23,SKIPPED,SKIPPED\n"
            "Diabetes,SKIPPED,SKIPPED,0.28,0.26,SKIPPED,SKIPPED\n"
            "King-Rook vs King-Pawn,SKIPPED,SKIPPED,0.07,0.06,SKIPPED,SKIPPED\n"
            "Vote,SKIPPED,SKIPPED,0.29,0.05,SKIPPED,SKIPPED\n");
  std::ostringstream table;
  write_benchmark_table(rows, m.protocol, table);
  EXPECT_NE(table.str().find("Protocol: "), std::string::npos);
}

TEST(Benchmark, SmallSyntheticRun) {
  const auto dir = fs::temp_directory_path() / "uninet_bench_test";
  fs::create_directories(dir);
  const auto data = generate_synthetic(
      LogicExpr::binary(1.0, LogicExpr::input(0), LogicExpr::input(1)), 3, 200, 0.0, 3);
  {
    std::ofstream out(dir / "toy.data");
    for (std::size_t r = 0; r < data.size(); ++r) {
      for (double v : data.features.row(r)) out << v << ',';
      out << data.labels[r] << '\n';
    }
    std::ofstream schema(dir / "toy.schema.json");
    schema << R"({"name": "toy", "columns": [
      {"name": "x0", "kind": "numeric"}, {"name": "x1", "kind": "numeric"},
      {"name": "x2", "kind": "numeric"}, {"name": "y", "kind": "label", "categories": ["0", "1"]}]})";
  }
  BenchmarkEntry e{"toy", "Toy, synthetic", "toy.data", "toy.schema.json", "", 0.1, 0.05};
  BenchmarkOptions opt;
  opt.seeds = 2;
  opt.train.max_epochs = 40;
  const auto row = run_benchmark(e, dir, dir, opt);
  ASSERT_FALSE(row.skipped);
  EXPECT_EQ(row.rows, 200u);
  EXPECT_EQ(row.fuzzy_rates.size(), 2u);
  EXPECT_EQ(row.dnn_rates.size(), 2u);
  EXPECT_LE(row.fuzzy_mean, 0.2);
  EXPECT_TRUE(row.omit_reason || !row.expression.empty());
  std::ostringstream out;
  write_benchmark_csv({row}, out);
  EXPECT_NE(out.str().find("\"Toy, synthetic\""), std::string::npos);
  const auto again = run_benchmark(e, dir, dir, opt);
  EXPECT_EQ(again.fuzzy_rates, row.fuzzy_rates);
  EXPECT_EQ(again.expression, row.expression);
  fs::remove_all(dir);
}
