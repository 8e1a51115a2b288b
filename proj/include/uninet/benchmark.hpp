// Misclassification benchmark on the UCI datasets listed in a manifest:
// fuzzy network and mirrored dense baseline on the same seeded splits,
// plus the expression extracted from the best fuzzy seed.

#ifndef UNINET_BENCHMARK_HPP_
#define UNINET_BENCHMARK_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uninet/extraction.hpp"
#include "uninet/training.hpp"

namespace uninet {

struct BenchmarkEntry {
  std::string id;
  std::string name;
  std::string data_file;
  std::string schema_file;
  std::string variant;
  double reference_fuzzy = 0;
  double reference_dnn = 0;
};

struct BenchmarkManifest {
  std::string protocol;
  std::vector<BenchmarkEntry> datasets;

  static BenchmarkManifest load(const std::filesystem::path& path);
};

struct BenchmarkOptions {
  std::size_t seeds = 5;
  std::uint64_t base_seed = 0;
  double test_fraction = 0.3;
  TrainConfig train;
  NetworkConfig network;
  ExtractionConfig extraction;
};

struct BenchmarkRow {
  BenchmarkEntry entry;
  bool skipped = false;
  std::string skip_reason;
  std::size_t rows = 0;
  std::size_t features = 0;
  std::vector<double> fuzzy_rates;
  std::vector<double> dnn_rates;
  double fuzzy_mean = 0;
  double dnn_mean = 0;
  std::size_t best_seed = 0;
  std::string expression;  // index-mode rendering, also when omitted
  std::optional<std::string> omit_reason;
  std::size_t leaves = 0;
  Faithfulness faithfulness;  // on the best seed's test split
  double seconds = 0;
};

/// Looks for the data and schema files under `data_dir`, falling back to
/// the manifest directory for the schema. A missing data file gives a
/// skipped row.
BenchmarkRow run_benchmark(const BenchmarkEntry& entry,
                           const std::filesystem::path& data_dir,
                           const std::filesystem::path& schema_dir,
                           const BenchmarkOptions& options);

/// Columns: dataset,fuzzy_rate,dnn_rate,reference_fuzzy,reference_dnn,expression,
/// faithfulness. Skipped rows carry SKIPPED in the measured columns.
void write_benchmark_csv(const std::vector<BenchmarkRow>& rows, std::ostream& out);

/// Human-readable side-by-side table with the protocol footer.
void write_benchmark_table(const std::vector<BenchmarkRow>& rows,
                           const std::string& protocol, std::ostream& out);

}  // namespace uninet

#endif  // UNINET_BENCHMARK_HPP_
