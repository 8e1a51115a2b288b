#include "uninet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "uninet/errors.hpp"
#include "uninet/random.hpp"

namespace uninet {

using nlohmann::json;

std::string_view column_kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::BinaryCategorical: return "binary_categorical";
    case ColumnKind::MultiCategorical: return "multi_categorical";
    case ColumnKind::Label: return "label";
    case ColumnKind::Ignore: return "ignore";
  }
  return "?";
}

namespace {

ColumnKind parse_column_kind(const std::string& s) {
  for (auto k : {ColumnKind::Numeric, ColumnKind::BinaryCategorical,
                 ColumnKind::MultiCategorical, ColumnKind::Label, ColumnKind::Ignore}) {
    if (column_kind_name(k) == s) return k;
  }
  throw DataError("schema: unknown column kind '" + s + "'");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(std::string_view(line).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ptrdiff_t find_category(const std::vector<std::string>& cats,
                             const std::string& v) {
  const auto it = std::find(cats.begin(), cats.end(), v);
  return it == cats.end() ? -1 : it - cats.begin();
}

}  // namespace

void DatasetSchema::validate() const {
  std::size_t labels = 0;
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::Label) ++labels;
    if (c.kind == ColumnKind::BinaryCategorical && c.categories.size() != 2) {
      throw DataError("schema: binary column '" + c.name +
                      "' needs exactly two categories");
    }
    if (c.kind == ColumnKind::MultiCategorical && c.categories.size() < 2) {
      throw DataError("schema: multi column '" + c.name +
                      "' needs at least two categories");
    }
  }
  if (labels != 1) throw DataError("schema: exactly one label column required");
}

std::size_t DatasetSchema::label_column() const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].kind == ColumnKind::Label) return i;
  }
  throw DataError("schema: no label column");
}

DatasetSchema DatasetSchema::from_json(const json& j) {
  try {
    DatasetSchema s;
    s.name = j.value("name", std::string{});
    const auto missing = j.value("missing_token", std::string("?"));
    const auto delim = j.value("delimiter", std::string(","));
    if (delim.size() != 1) throw DataError("schema: delimiter must be one character");
    s.delimiter = delim[0];
    for (const auto& cj : j.at("columns")) {
      ColumnSchema c;
      c.name = cj.at("name").get<std::string>();
      c.kind = parse_column_kind(cj.at("kind").get<std::string>());
      c.categories = cj.value("categories", std::vector<std::string>{});
      c.missing_token = cj.value("missing_token", missing);
      s.columns.push_back(std::move(c));
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("schema: malformed document: ") + e.what());
  }
}

DatasetSchema DatasetSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read schema file " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw DataError("schema file " + path.string() + " is not JSON: " + e.what());
  }
}

std::vector<std::size_t> Dataset::class_sizes() const {
  std::vector<std::size_t> n(class_count, 0);
  for (auto y : labels) ++n[y];
  return n;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset d;
  d.features = Matrix(rows.size(), features.cols());
  d.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = features.row(rows[r]);
    std::copy(src.begin(), src.end(), d.features.row(r).begin());
    d.labels.push_back(labels[rows[r]]);
  }
  d.feature_names = feature_names;
  d.class_names = class_names;
  d.class_count = class_count;
  d.encoding_report = encoding_report;
  return d;
}

Dataset parse_csv(std::istream& in, const DatasetSchema& schema,
                  const std::string& source) {
  schema.validate();
  Dataset d;
  const auto label_col = schema.label_column();
  const auto& label_schema = schema.columns[label_col];
  d.class_names = label_schema.categories;
  const bool fixed_classes = !d.class_names.empty();

  for (const auto& c : schema.columns) {
    switch (c.kind) {
      case ColumnKind::Numeric:
        d.feature_names.push_back(c.name);
        d.encoding_report.push_back(c.name + ": numeric, missing -> 0");
        break;
      case ColumnKind::BinaryCategorical:
        d.feature_names.push_back(c.name);
        d.encoding_report.push_back(c.name + ": binary " + c.categories[0] +
                                    " -> -1, " + c.categories[1] +
                                    " -> +1, missing -> 0");
        break;
      case ColumnKind::MultiCategorical:
        for (const auto& cat : c.categories) d.feature_names.push_back(c.name + "=" + cat);
        d.encoding_report.push_back(c.name + ": one-hot over " +
                                    std::to_string(c.categories.size()) +
                                    " categories, missing -> all -1");
        break;
      case ColumnKind::Label:
      case ColumnKind::Ignore:
        break;
    }
  }
  const std::size_t width = d.feature_names.size();

  std::vector<double> values;
  std::map<std::string, std::size_t> unknown;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tokens = split_line(line, schema.delimiter);
    if (tokens.size() != schema.columns.size()) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(schema.columns.size()) + " fields, got " +
                      std::to_string(tokens.size()));
    }
    for (std::size_t c = 0; c < tokens.size(); ++c) {
      const auto& col = schema.columns[c];
      const auto& tok = tokens[c];
      const bool missing = tok == col.missing_token;
      switch (col.kind) {
        case ColumnKind::Numeric: {
          double v = 0;
          if (!missing) {
            const auto* end = tok.data() + tok.size();
            auto [ptr, ec] = std::from_chars(tok.data(), end, v);
            if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
              throw DataError(source + ":" + std::to_string(line_no) +
                              ": column '" + col.name + "' is not numeric: '" +
                              tok + "'");
            }
          }
          values.push_back(v);
          break;
        }
        case ColumnKind::BinaryCategorical: {
          double v = 0;
          if (!missing) {
            const auto k = find_category(col.categories, tok);
            if (k < 0) {
              ++unknown[col.name + "=" + tok];
            } else {
              v = k == 0 ? -1.0 : 1.0;
            }
          }
          values.push_back(v);
          break;
        }
        case ColumnKind::MultiCategorical: {
          const auto k = missing ? -1 : find_category(col.categories, tok);
          const bool bad = !missing && k < 0;
          if (bad) ++unknown[col.name + "=" + tok];
          for (std::size_t i = 0; i < col.categories.size(); ++i) {
            values.push_back(bad ? 0.0 : (static_cast<std::ptrdiff_t>(i) == k ? 1.0 : -1.0));
          }
          break;
        }
        case ColumnKind::Label: {
          auto k = find_category(d.class_names, tok);
          if (k < 0) {
            if (fixed_classes) {
              throw DataError(source + ":" + std::to_string(line_no) +
                              ": unknown class '" + tok + "'");
            }
            d.class_names.push_back(tok);
            k = static_cast<std::ptrdiff_t>(d.class_names.size() - 1);
          }
          d.labels.push_back(static_cast<std::size_t>(k));
          break;
        }
        case ColumnKind::Ignore:
          break;
      }
    }
  }
  for (const auto& [what, count] : unknown) {
    const auto msg = "unknown category " + what + " in " + std::to_string(count) +
                     " rows, encoded as 0";
    d.encoding_report.push_back(msg);
    d.warnings.push_back(msg);
  }
  d.class_count = d.class_names.size();
  if (d.labels.empty()) throw DataError(source + ": no data rows");
  if (d.class_count < 2) throw DataError(source + ": fewer than two classes");
  d.features = Matrix(d.labels.size(), width);
  d.features.data() = std::move(values);
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read data file " + path.string());
  return parse_csv(in, schema, path.string());
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (const auto& name : data.feature_names) out << name << ',';
  out << "label\n";
  const auto old = out.precision(10);
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (double v : data.features.row(r)) out << v << ',';
    out << data.labels[r] << '\n';
  }
  out.precision(old);
}

Split split(const Dataset& data, double test_fraction, std::uint64_t seed,
            bool stratified) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  Split out;
  std::vector<std::size_t> train_rows, test_rows;
  auto take = [&](std::vector<std::size_t> rows) {
    rng.shuffle(std::span<std::size_t>(rows));
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + n_test);
    train_rows.insert(train_rows.end(), rows.begin() + n_test, rows.end());
  };
  if (stratified) {
    std::vector<std::vector<std::size_t>> by_class(data.class_count);
    for (std::size_t i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      if (by_class[c].size() == 1) {
        out.warnings.push_back("class " + std::to_string(c) +
                               " has a single instance; kept in train");
        train_rows.push_back(by_class[c][0]);
        continue;
      }
      take(std::move(by_class[c]));
    }
  } else {
    std::vector<std::size_t> rows(data.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    take(std::move(rows));
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  out.train = data.subset(train_rows);
  out.test = data.subset(test_rows);
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels,
                                          std::size_t class_count,
                                          std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross validation needs at least two folds");
  std::vector<std::vector<std::size_t>> by_class(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class.at(labels[i]).push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> fold(labels.size(), 0);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < class_count; ++c) {
    auto& rows = by_class[c];
    if (rows.size() < folds) {
      throw DataError("class " + std::to_string(c) + " has " +
                      std::to_string(rows.size()) + " members, fewer than " +
                      std::to_string(folds) + " folds");
    }
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t i = 0; i < rows.size(); ++i) fold[rows[i]] = (offset + i) % folds;
    offset = (offset + rows.size()) % folds;
  }
  return fold;
}

Dataset generate_synthetic(const LogicExpr& expr, std::size_t k, std::size_t n,
                           double noise, std::uint64_t seed) {
  if (!(noise >= 0.0 && noise < 0.5)) throw ConfigError("noise must lie in [0, 0.5)");
  if (k == 0 || (expr.has_inputs() && expr.max_input_index() >= k)) {
    throw ConfigError("expression references features beyond k");
  }
  Rng rng(seed);
  Dataset d;
  d.features = Matrix(n, k);
  d.labels.resize(n);
  std::vector<double> z(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& v : z) v = rng.uniform();
    std::size_t y = expr.evaluate(z) >= 0.5 ? 1 : 0;
    if (noise > 0 && rng.uniform() < noise) y = 1 - y;
    for (std::size_t c = 0; c < k; ++c) d.features(r, c) = 2.0 * z[c] - 1.0;
    d.labels[r] = y;
  }
  for (std::size_t c = 0; c < k; ++c) d.feature_names.push_back("x" + std::to_string(c));
  d.class_names = {"0", "1"};
  d.class_count = 2;
  d.encoding_report.push_back("synthetic: " + render(expr) + ", noise " +
                              std::to_string(noise));
  return d;
}

}  // namespace uninet
