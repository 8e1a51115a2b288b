// uninet command-line tool: train, eval, extract, benchmark, plot-squash.
//
// Exit codes: 0 ok, 2 usage error or missing input, 3 numeric failure,
// 4 shape mismatch between model and data.

#include <CLI11.hpp>

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uninet/benchmark.hpp"
#include "uninet/dataset.hpp"
#include "uninet/errors.hpp"
#include "uninet/extraction.hpp"
#include "uninet/fuzzy.hpp"
#include "uninet/model_io.hpp"
#include "uninet/network.hpp"
#include "uninet/training.hpp"

#ifndef UNINET_VERSION
#define UNINET_VERSION "unknown"
#endif
#ifndef UNINET_SOURCE_DATA_DIR
#define UNINET_SOURCE_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uninet;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitShape = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data, schema, model, out, log, manifest, csv, data_dir, datasets;
  bool json_output = false;
  bool leaf_names = false;
  long output_index = -1;
  std::uint64_t seed = 0;
  std::size_t seeds = 5;
  double test_fraction = 0.3;
  TrainConfig train;
  NetworkConfig network;
  ExtractionConfig extraction;
};

std::map<std::string, std::function<void(Options&, const json&)>> config_keys() {
  return {
      {"seed", [](Options& o, const json& v) { o.seed = v.get<std::uint64_t>(); }},
      {"epochs", [](Options& o, const json& v) { o.train.max_epochs = v.get<std::size_t>(); }},
      {"patience", [](Options& o, const json& v) { o.train.patience = v.get<std::size_t>(); }},
      {"lr", [](Options& o, const json& v) { o.train.learning_rate = v.get<double>(); }},
      {"alpha-lr", [](Options& o, const json& v) { o.train.alpha_learning_rate = v.get<double>(); }},
      {"l1", [](Options& o, const json& v) { o.train.l1_regularization = v.get<double>(); }},
      {"batch", [](Options& o, const json& v) { o.train.batch_size = v.get<std::size_t>(); }},
      {"validation-fraction",
       [](Options& o, const json& v) { o.train.validation_fraction = v.get<double>(); }},
      {"hidden", [](Options& o, const json& v) { o.network.hidden_width = v.get<std::size_t>(); }},
      {"logic-parts",
       [](Options& o, const json& v) { o.network.logic_parts = v.get<std::size_t>(); }},
      {"beta", [](Options& o, const json& v) { o.network.squash.beta = v.get<double>(); }},
      {"alpha-tolerance",
       [](Options& o, const json& v) { o.extraction.alpha_tolerance = v.get<double>(); }},
      {"keep-ratio",
       [](Options& o, const json& v) { o.extraction.weight_keep_ratio = v.get<double>(); }},
      {"max-terms",
       [](Options& o, const json& v) { o.extraction.max_terms_per_node = v.get<std::size_t>(); }},
      {"max-leaves",
       [](Options& o, const json& v) { o.extraction.max_leaves = v.get<std::size_t>(); }},
      {"max-length",
       [](Options& o, const json& v) { o.extraction.max_rendered_length = v.get<std::size_t>(); }},
      {"seeds", [](Options& o, const json& v) { o.seeds = v.get<std::size_t>(); }},
      {"test-fraction", [](Options& o, const json& v) { o.test_fraction = v.get<double>(); }},
  };
}

/// Applies a --config JSON file before flag parsing, so explicit flags win.
void preload_config(int argc, char** argv, Options& opts) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + " is not JSON: " + e.what());
  }
  const auto keys = config_keys();
  for (const auto& [key, value] : doc.items()) {
    const auto it = keys.find(key);
    if (it == keys.end()) throw UsageError("unknown config key '" + key + "'");
    try {
      it->second(opts, value);
    } catch (const json::exception& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", digest[i]);
    hex += two;
  }
  return hex;
}

fs::path resolve_input(const std::string& given, const char* what) {
  if (given.empty()) throw UsageError(std::string("missing --") + what);
  fs::path p(given);
  if (fs::exists(p)) return p;
  if (p.is_relative()) {
    if (const char* dir = std::getenv("UNINET_DATA_DIR")) {
      const fs::path alt = fs::path(dir) / p;
      if (fs::exists(alt)) return alt;
    }
  }
  throw UsageError(std::string(what) + " file not found: " + given);
}

fs::path resolve_schema(const Options& o, const fs::path& data_path) {
  if (!o.schema.empty()) return resolve_input(o.schema, "schema");
  fs::path guess = data_path;
  guess.replace_extension(".schema.json");
  if (fs::exists(guess)) return guess;
  throw UsageError("missing --schema (no " + guess.string() + ")");
}

std::string sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  p.replace_extension();
  return p.string() + suffix;
}

json network_json(const NetworkConfig& n) {
  return {{"hidden_width", n.hidden_width},
          {"logic_parts", n.logic_parts},
          {"max_pairings", n.max_pairings},
          {"seed", n.seed},
          {"squash",
           {{"center", n.squash.center},
            {"ramp_width", n.squash.ramp_width},
            {"beta", n.squash.beta}}}};
}

json training_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"alpha_learning_rate", t.alpha_learning_rate},
          {"l1_regularization", t.l1_regularization},
          {"max_epochs", t.max_epochs},
          {"patience", t.patience},
          {"batch_size", t.batch_size},
          {"seed", t.seed},
          {"validation_fraction", t.validation_fraction}};
}

json extraction_json(const ExtractionConfig& e) {
  return {{"alpha_tolerance", e.alpha_tolerance},
          {"weight_keep_ratio", e.weight_keep_ratio},
          {"min_abs_weight", e.min_abs_weight},
          {"max_terms_per_node", e.max_terms_per_node},
          {"max_leaves", e.max_leaves},
          {"max_rendered_length", e.max_rendered_length}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

void add_train_flags(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Seed for initialization, splits and shuffling");
  sub->add_option("--epochs", o.train.max_epochs, "Maximum epochs");
  sub->add_option("--patience", o.train.patience, "Early-stopping patience in epochs");
  sub->add_option("--lr", o.train.learning_rate, "Learning rate of the weights");
  sub->add_option("--alpha-lr", o.train.alpha_learning_rate, "Learning rate of the alphas");
  sub->add_option("--l1", o.train.l1_regularization, "Regularization coefficient");
  sub->add_option("--batch", o.train.batch_size, "Minibatch size");
  sub->add_option("--validation-fraction", o.train.validation_fraction,
                  "Share of the training rows held out for early stopping");
  sub->add_option("--hidden", o.network.hidden_width, "Hidden selector width");
  sub->add_option("--logic-parts", o.network.logic_parts, "Number of logic parts");
  sub->add_option("--beta", o.network.squash.beta, "Squashing steepness");
}

void add_extraction_flags(CLI::App* sub, Options& o) {
  sub->add_option("--alpha-tolerance", o.extraction.alpha_tolerance);
  sub->add_option("--keep-ratio", o.extraction.weight_keep_ratio);
  sub->add_option("--max-terms", o.extraction.max_terms_per_node);
  sub->add_option("--max-leaves", o.extraction.max_leaves);
  sub->add_option("--max-length", o.extraction.max_rendered_length);
}

int cmd_train(Options& o) {
  if (o.out.empty()) o.out = "model.json";
  const auto data_path = resolve_input(o.data, "data");
  const auto schema_path = resolve_schema(o, data_path);
  const auto data = load_csv(data_path, DatasetSchema::load(schema_path));
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';

  o.network.seed = o.seed;
  o.train.seed = o.seed;
  auto net = build_network(data.feature_count(), data.class_count, o.network);
  net.metadata.feature_names = data.feature_names;
  net.metadata.class_names = data.class_names;
  auto result = train(std::move(net), data, o.train);

  const std::string log_path = o.log.empty() ? sibling(o.out, ".log.csv") : o.log;
  const std::string manifest_path =
      o.manifest.empty() ? sibling(o.out, ".manifest.json") : o.manifest;
  save_network(result.model, o.out);
  {
    std::ofstream log(log_path);
    if (!log) throw UsageError("cannot write " + log_path);
    write_training_log(result.log, log);
  }
  const auto fit = evaluate(result.model, data);
  json manifest = {
      {"command", "train"},
      {"version", UNINET_VERSION},
      {"dataset",
       {{"path", o.data},
        {"sha256", sha256_file(data_path)},
        {"rows", data.size()},
        {"features", data.feature_count()},
        {"classes", data.class_count}}},
      {"schema", {{"path", schema_path.string()}, {"sha256", sha256_file(schema_path)}}},
      {"network", network_json(o.network)},
      {"training", training_json(o.train)},
      {"result",
       {{"best_epoch", result.best_epoch},
        {"epochs_run", result.log.size()},
        {"best_val_misclassification", result.best_val_misclassification},
        {"train_misclassification", fit.misclassification_rate}}},
      {"outputs", {{"model", o.out}, {"log", log_path}}},
  };
  write_text(manifest_path, manifest.dump(1) + "\n");
  std::cout << "model: " << o.out << "\nlog: " << log_path << "\nmanifest: " << manifest_path
            << "\nbest epoch " << result.best_epoch << " of " << result.log.size()
            << ", training misclassification " << fit.misclassification_rate << '\n';
  return 0;
}

LogicNetwork load_model(const Options& o) {
  const auto path = resolve_input(o.model, "model");
  return load_network(path);
}

Dataset load_matching(const Options& o, const LogicNetwork& net) {
  const auto data_path = resolve_input(o.data, "data");
  const auto data = load_csv(data_path, DatasetSchema::load(resolve_schema(o, data_path)));
  if (data.feature_count() != net.feature_count()) {
    throw ShapeError("data has " + std::to_string(data.feature_count()) +
                     " encoded features, model expects " +
                     std::to_string(net.feature_count()));
  }
  if (data.class_count != net.class_count()) {
    throw ShapeError("data has " + std::to_string(data.class_count) +
                     " classes, model expects " + std::to_string(net.class_count()));
  }
  return data;
}

int cmd_eval(Options& o) {
  const auto net = load_model(o);
  const auto data = load_matching(o, net);
  const auto m = evaluate(net, data);
  if (o.json_output) {
    json j = m.to_json();
    j["model"] = o.model;
    j["data"] = o.data;
    j["class_names"] = data.class_names;
    std::cout << j.dump(1) << '\n';
    return 0;
  }
  std::cout << "misclassification_rate: " << m.misclassification_rate << "\n"
            << "instances: " << m.total << "\n"
            << "confusion (rows = true class, columns = predicted):\n";
  for (std::size_t r = 0; r < m.confusion.size(); ++r) {
    std::cout << "  " << data.class_names[r] << ':';
    for (auto c : m.confusion[r]) std::cout << ' ' << c;
    std::cout << '\n';
  }
  return 0;
}

int cmd_extract(Options& o) {
  const auto net = load_model(o);
  std::optional<Dataset> data;
  if (!o.data.empty()) data = load_matching(o, net);
  const bool use_truth_table = !data && net.feature_count() <= 12;
  const Matrix table = use_truth_table ? boolean_truth_table(net.feature_count()) : Matrix();

  std::vector<std::string> names;
  if (o.leaf_names) {
    names = net.metadata.feature_names;
    if (names.size() != net.feature_count()) {
      names.clear();
      for (std::size_t i = 0; i < net.feature_count(); ++i) names.push_back("x" + std::to_string(i));
    }
  }

  json outputs = json::array();
  for (std::size_t out = 0; out < net.output_width(); ++out) {
    if (o.output_index >= 0 && static_cast<std::size_t>(o.output_index) != out) continue;
    const auto traced = trace_expression(net, o.extraction, out);
    const auto omit = should_omit(traced, o.extraction);
    const auto text = render(traced.expr, names);
    std::optional<Faithfulness> faith;
    std::string faith_source;
    if (data) {
      faith = faithfulness(net, traced.expr, *data, out);
      faith_source = "data, " + std::to_string(data->size()) + " rows";
    } else if (use_truth_table) {
      faith = faithfulness(net, traced.expr, table, out);
      faith_source = "truth table, " + std::to_string(table.rows()) + " rows";
    }
    if (o.json_output) {
      json j = {{"index", out},
                {"expression", text},
                {"omitted", omit.omit},
                {"reason", omit.reason},
                {"leaves", traced.expr.leaf_count()},
                {"max_terms", traced.max_terms},
                {"tree", expr_to_json(traced.expr)}};
      if (faith) {
        j["faithfulness"] = {{"agreement", faith->agreement},
                             {"decisive_agreement", faith->decisive_agreement},
                             {"undecided", faith->undecided},
                             {"total", faith->total},
                             {"source", faith_source}};
      }
      outputs.push_back(std::move(j));
      continue;
    }
    std::cout << "output " << out << ": ";
    if (omit.omit) {
      std::cout << "omitted: " << omit.reason << " (" << traced.expr.leaf_count()
                << " leaves)\n";
    } else {
      std::cout << text << '\n';
    }
    if (faith) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "  faithfulness (%s): %.4f (decisive %.4f, %zu undecided)\n",
                    faith_source.c_str(), faith->agreement, faith->decisive_agreement,
                    faith->undecided);
      std::cout << buf;
    }
  }
  if (o.json_output) std::cout << json{{"outputs", outputs}}.dump(1) << '\n';
  return 0;
}

int cmd_benchmark(Options& o) {
  fs::path data_dir = o.data_dir;
  if (data_dir.empty()) {
    const char* env = std::getenv("UNINET_DATA_DIR");
    data_dir = env ? fs::path(env) : fs::path("data");
  }
  const fs::path source_dir = UNINET_SOURCE_DATA_DIR;
  fs::path manifest_path = o.manifest;
  if (manifest_path.empty()) {
    manifest_path = data_dir / "benchmarks.json";
    if (!fs::exists(manifest_path)) manifest_path = source_dir / "benchmarks.json";
  }
  const auto manifest = BenchmarkManifest::load(manifest_path);

  BenchmarkOptions bo;
  bo.seeds = o.seeds;
  bo.base_seed = o.seed;
  bo.test_fraction = o.test_fraction;
  bo.train = o.train;
  bo.network = o.network;
  bo.extraction = o.extraction;

  std::vector<std::string> wanted;
  if (!o.datasets.empty()) {
    std::stringstream ss(o.datasets);
    for (std::string id; std::getline(ss, id, ',');) wanted.push_back(id);
  }
  std::vector<BenchmarkRow> rows;
  json runs = json::array();
  for (const auto& entry : manifest.datasets) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), entry.id) == wanted.end()) {
      continue;
    }
    std::cerr << "benchmark: " << entry.name << "...\n";
    rows.push_back(run_benchmark(entry, data_dir, source_dir, bo));
    const auto& r = rows.back();
    json run = {{"id", entry.id}, {"skipped", r.skipped}};
    if (!r.skipped) {
      run["sha256"] = sha256_file(data_dir / entry.data_file);
      run["fuzzy_rates"] = r.fuzzy_rates;
      run["dnn_rates"] = r.dnn_rates;
      run["best_seed"] = r.best_seed;
    }
    runs.push_back(std::move(run));
  }
  write_benchmark_table(rows, manifest.protocol, std::cout);
  const std::string csv_path = o.csv.empty() ? "benchmark.csv" : o.csv;
  {
    std::ofstream csv(csv_path);
    if (!csv) throw UsageError("cannot write " + csv_path);
    write_benchmark_csv(rows, csv);
  }
  json run_manifest = {{"command", "benchmark"},
                       {"version", UNINET_VERSION},
                       {"manifest", manifest_path.string()},
                       {"seeds", o.seeds},
                       {"base_seed", o.seed},
                       {"test_fraction", o.test_fraction},
                       {"network", network_json(o.network)},
                       {"training", training_json(o.train)},
                       {"extraction", extraction_json(o.extraction)},
                       {"datasets", runs}};
  write_text(sibling(csv_path, ".manifest.json"), run_manifest.dump(1) + "\n");
  std::cout << "csv: " << csv_path << '\n';
  return 0;
}

int cmd_plot_squash(Options& o) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw UsageError("cannot write " + o.out);
    out = &file;
  }
  *out << "x,cut,beta_10,beta_50,beta_80\n";
  char line[160];
  for (int i = 0; i <= 2000; ++i) {
    const double x = (i - 500) / 1000.0;
    std::snprintf(line, sizeof line, "%.3f,%.10f,%.10f,%.10f,%.10f\n", x, cut(x),
                  squash(x, {0.5, 1.0, 10.0}), squash(x, {0.5, 1.0, 50.0}),
                  squash(x, {0.5, 1.0, 80.0}));
    *out << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Interpretable fuzzy logic networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(UNINET_VERSION));
  std::string config_path;

  auto* train_cmd = app.add_subcommand("train", "Train a logic network on a dataset");
  train_cmd->add_option("--data", o.data, "Comma-separated data file");
  train_cmd->add_option("--schema", o.schema, "Schema JSON (default: <data>.schema.json)");
  train_cmd->add_option("--out", o.out, "Model JSON to write (default model.json)");
  train_cmd->add_option("--log", o.log, "Training log CSV");
  train_cmd->add_option("--manifest", o.manifest, "Run manifest JSON");
  train_cmd->add_option("--config", config_path, "JSON defaults, overridden by flags");
  add_train_flags(train_cmd, o);

  auto* eval_cmd = app.add_subcommand("eval", "Misclassification rate of a model");
  eval_cmd->add_option("--model", o.model, "Model JSON");
  eval_cmd->add_option("--data", o.data, "Data file");
  eval_cmd->add_option("--schema", o.schema, "Schema JSON");
  eval_cmd->add_flag("--json", o.json_output, "Machine-readable output");
  eval_cmd->add_option("--config", config_path);

  auto* extract_cmd = app.add_subcommand("extract", "Logic expressions of a model");
  extract_cmd->add_option("--model", o.model, "Model JSON");
  extract_cmd->add_option("--data", o.data, "Data for faithfulness (default: truth table)");
  extract_cmd->add_option("--schema", o.schema, "Schema JSON");
  extract_cmd->add_option("--output-index", o.output_index, "Only this output unit");
  extract_cmd->add_flag("--leaf-names", o.leaf_names, "Render feature names");
  extract_cmd->add_flag("--json", o.json_output, "Machine-readable output");
  extract_cmd->add_option("--config", config_path);
  add_extraction_flags(extract_cmd, o);

  auto* bench_cmd = app.add_subcommand("benchmark", "Compare fuzzy and dense nets on the benchmark datasets");
  bench_cmd->add_option("--data-dir", o.data_dir, "Dataset directory (default $UNINET_DATA_DIR or data)");
  bench_cmd->add_option("--manifest", o.manifest, "Benchmark manifest JSON");
  bench_cmd->add_option("--datasets", o.datasets, "Comma-separated dataset ids");
  bench_cmd->add_option("--seeds", o.seeds, "Repetitions per dataset");
  bench_cmd->add_option("--test-fraction", o.test_fraction, "Test share of each split");
  bench_cmd->add_option("--csv", o.csv, "CSV report (default benchmark.csv)");
  bench_cmd->add_option("--config", config_path);
  add_train_flags(bench_cmd, o);
  add_extraction_flags(bench_cmd, o);

  auto* plot_cmd = app.add_subcommand("plot-squash", "Squashing curves as CSV");
  plot_cmd->add_option("--out", o.out, "CSV file (default stdout)");

  try {
    preload_config(argc, argv, o);
    app.parse(argc, argv);
    if (train_cmd->parsed()) return cmd_train(o);
    if (eval_cmd->parsed()) return cmd_eval(o);
    if (extract_cmd->parsed()) return cmd_extract(o);
    if (bench_cmd->parsed()) return cmd_benchmark(o);
    if (plot_cmd->parsed()) return cmd_plot_squash(o);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitShape;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitShape;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
