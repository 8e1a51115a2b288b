#include "uninet/benchmark.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "uninet/errors.hpp"

namespace uninet {

BenchmarkManifest BenchmarkManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read benchmark manifest " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    BenchmarkManifest m;
    m.protocol = j.value("protocol", std::string{});
    for (const auto& d : j.at("datasets")) {
      BenchmarkEntry e;
      e.id = d.at("id").get<std::string>();
      e.name = d.value("name", e.id);
      e.data_file = d.at("data").get<std::string>();
      e.schema_file = d.at("schema").get<std::string>();
      e.variant = d.value("variant", std::string{});
      e.reference_fuzzy = d.at("reference_fuzzy").get<double>();
      e.reference_dnn = d.at("reference_dnn").get<double>();
      m.datasets.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("benchmark manifest " + path.string() + ": " + e.what());
  }
}

namespace {

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string expression_cell(const BenchmarkRow& r) {
  if (r.omit_reason) return "omitted: " + *r.omit_reason;
  return r.expression;
}

}  // namespace

BenchmarkRow run_benchmark(const BenchmarkEntry& entry,
                           const std::filesystem::path& data_dir,
                           const std::filesystem::path& schema_dir,
                           const BenchmarkOptions& options) {
  BenchmarkRow row;
  row.entry = entry;
  const auto data_path = data_dir / entry.data_file;
  if (!std::filesystem::exists(data_path)) {
    row.skipped = true;
    row.skip_reason = "missing " + data_path.string();
    return row;
  }
  auto schema_path = data_dir / entry.schema_file;
  if (!std::filesystem::exists(schema_path)) schema_path = schema_dir / entry.schema_file;
  const auto start = std::chrono::steady_clock::now();
  const auto data = load_csv(data_path, DatasetSchema::load(schema_path));
  row.rows = data.size();
  row.features = data.feature_count();

  double best_rate = 2.0;
  for (std::size_t s = 0; s < options.seeds; ++s) {
    const std::uint64_t seed = options.base_seed + s;
    const auto parts = split(data, options.test_fraction, seed, true);
    NetworkConfig net_cfg = options.network;
    net_cfg.seed = seed;
    TrainConfig train_cfg = options.train;
    train_cfg.seed = seed;

    auto net = build_network(data.feature_count(), data.class_count, net_cfg);
    const auto widths = mirrored_widths(net);
    const auto fuzzy = train(std::move(net), parts.train, train_cfg);
    const double rate = evaluate(fuzzy.model, parts.test).misclassification_rate;
    row.fuzzy_rates.push_back(rate);

    const auto dense = train_baseline(DenseNetwork(widths, seed), parts.train, train_cfg);
    row.dnn_rates.push_back(evaluate(dense.model, parts.test).misclassification_rate);

    if (rate < best_rate) {
      best_rate = rate;
      row.best_seed = seed;
      const auto traced = trace_expression(fuzzy.model, options.extraction, 0);
      const auto omit = should_omit(traced, options.extraction);
      row.expression = render(traced.expr);
      row.leaves = traced.expr.leaf_count();
      row.omit_reason = omit.omit ? std::optional<std::string>(omit.reason) : std::nullopt;
      row.faithfulness = faithfulness(fuzzy.model, traced.expr, parts.test, 0);
    }
  }
  row.fuzzy_mean = mean(row.fuzzy_rates);
  row.dnn_mean = mean(row.dnn_rates);
  row.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

void write_benchmark_csv(const std::vector<BenchmarkRow>& rows, std::ostream& out) {
  out << "dataset,fuzzy_rate,dnn_rate,reference_fuzzy,reference_dnn,expression,faithfulness\n";
  for (const auto& r : rows) {
    out << csv_cell(r.entry.name) << ',';
    if (r.skipped) {
      out << "SKIPPED,SKIPPED," << fixed(r.entry.reference_fuzzy, 2) << ','
          << fixed(r.entry.reference_dnn, 2) << ",SKIPPED,SKIPPED\n";
      continue;
    }
    out << fixed(r.fuzzy_mean, 4) << ',' << fixed(r.dnn_mean, 4) << ','
        << fixed(r.entry.reference_fuzzy, 2) << ',' << fixed(r.entry.reference_dnn, 2) << ','
        << csv_cell(expression_cell(r)) << ',' << fixed(r.faithfulness.agreement, 4)
        << '\n';
  }
}

void write_benchmark_table(const std::vector<BenchmarkRow>& rows,
                           const std::string& protocol, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %10s %10s %12s %10s\n", "dataset", "fuzzy",
                "dnn", "ref fuzzy", "ref dnn");
  out << line;
  for (const auto& r : rows) {
    if (r.skipped) {
      std::snprintf(line, sizeof line, "%-24s %10s %10s %12.2f %10.2f\n",
                    r.entry.name.c_str(), "SKIPPED", "SKIPPED", r.entry.reference_fuzzy,
                    r.entry.reference_dnn);
      out << line << "    " << r.skip_reason << '\n';
      continue;
    }
    std::snprintf(line, sizeof line, "%-24s %10.4f %10.4f %12.2f %10.2f\n",
                  r.entry.name.c_str(), r.fuzzy_mean, r.dnn_mean, r.entry.reference_fuzzy,
                  r.entry.reference_dnn);
    out << line;
    out << "    expression (seed " << r.best_seed << "): " << expression_cell(r);
    if (r.omit_reason) out << " [" << r.leaves << " leaves]";
    out << "\n    faithfulness on test split: " << fixed(r.faithfulness.agreement, 4)
        << " (decisive " << fixed(r.faithfulness.decisive_agreement, 4) << ", "
        << r.faithfulness.undecided << " undecided)\n";
  }
  out << "\nProtocol: " << protocol << ".\n"
      << "Reference columns are the published numbers; exact reproduction is not "
         "expected.\n";
}

}  // namespace uninet
