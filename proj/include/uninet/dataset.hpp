// Tabular datasets: schema-driven CSV loading, seeded splits and synthetic
// logic datasets.
//
// Encodings (signed, True = +1, False = -1):
//   numeric            value passed through, missing -> 0
//   binary_categorical categories [neg, pos] -> -1 / +1, missing -> 0
//   multi_categorical  one column per category, hot +1, cold -1;
//                      missing -> all -1, unknown value -> all 0
//   label              dense class index (schema order, else first occurrence)
//   ignore             dropped

#ifndef UNINET_DATASET_HPP_
#define UNINET_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uninet/expr.hpp"
#include "uninet/matrix.hpp"

namespace uninet {

enum class ColumnKind { Numeric, BinaryCategorical, MultiCategorical, Label, Ignore };

std::string_view column_kind_name(ColumnKind kind);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<std::string> categories;  // categorical columns; label order
  std::string missing_token = "?";
};

struct DatasetSchema {
  std::string name;
  std::vector<ColumnSchema> columns;
  char delimiter = ',';

  /// Throws DataError unless there is exactly one label column and every
  /// binary column lists two categories.
  void validate() const;
  std::size_t label_column() const;

  static DatasetSchema from_json(const nlohmann::json& j);
  static DatasetSchema load(const std::filesystem::path& path);
};

struct Dataset {
  Matrix features;
  std::vector<std::size_t> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::size_t class_count = 0;
  std::vector<std::string> encoding_report;
  std::vector<std::string> warnings;

  std::size_t size() const { return labels.size(); }
  std::size_t feature_count() const { return features.cols(); }
  std::vector<std::size_t> class_sizes() const;

  /// Rows in the given order; names and class bookkeeping are kept.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Throws DataError naming the line on malformed rows.
Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);
Dataset parse_csv(std::istream& in, const DatasetSchema& schema,
                  const std::string& source = "<stream>");

/// Canonical dump: header of feature names plus "label", one row per
/// instance with the encoded values.
void write_csv(const Dataset& data, std::ostream& out);

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

/// Seeded shuffle into train and a `test_fraction` test part. Stratified
/// splits take round(fraction * size) of each class; a class with a single
/// instance stays in train with a warning. Throws ConfigError unless
/// 0 < test_fraction < 1.
Split split(const Dataset& data, double test_fraction, std::uint64_t seed,
            bool stratified = true);

/// Stratified fold index (0..folds-1) per row. Throws DataError when a
/// class has fewer members than folds.
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels,
                                          std::size_t class_count,
                                          std::size_t folds, std::uint64_t seed);

/// z ~ U[0,1]^k, label = [expr(z) >= 0.5] flipped with probability `noise`,
/// features 2z - 1. Throws ConfigError when noise is outside [0, 0.5) or
/// expr references a feature >= k.
Dataset generate_synthetic(const LogicExpr& expr, std::size_t k, std::size_t n,
                           double noise, std::uint64_t seed);

}  // namespace uninet

#endif  // UNINET_DATASET_HPP_
