#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "uninet/dataset.hpp"
#include "uninet/extraction.hpp"
#include "uninet/model_io.hpp"

using namespace uninet;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("uninet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) {
    const auto out_file = dir_ / "stdout.txt";
    const std::string cmd = std::string("\"") + UNINET_CLI_PATH + "\" " + args + " > \"" +
                            out_file.string() + "\" 2> \"" + (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out_file)};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path write_dataset(const std::string& name, std::size_t features, bool poison = false) {
    const auto expr = LogicExpr::binary(1.0, LogicExpr::input(0), LogicExpr::input(1));
    const auto d = generate_synthetic(expr, features, 200, 0.0, 3);
    const auto path = dir_ / (name + ".data");
    std::ofstream out(path);
    for (std::size_t r = 0; r < d.size(); ++r) {
      for (std::size_t c = 0; c < features; ++c) {
        if (poison && r == 7 && c == 1) {
          out << "nan,";
        } else {
          out << d.features(r, c) << ',';
        }
      }
      out << (d.labels[r] == 1 ? "yes" : "no") << '\n';
    }
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t c = 0; c < features; ++c) {
      cols.push_back({{"name", "f" + std::to_string(c)}, {"kind", "numeric"}});
    }
    cols.push_back({{"name", "class"}, {"kind", "label"}, {"categories", {"no", "yes"}}});
    std::ofstream(dir_ / (name + ".schema.json")) << nlohmann::json{{"name", name}, {"columns", cols}};
    return path;
  }

  std::string q(const fs::path& p) const { return "\"" + p.string() + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run("").code, 2); }

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST_F(Cli, MissingInputsAreUsageErrors) {
  EXPECT_EQ(run("eval --model " + q(dir_ / "none.json") + " --data x.data").code, 2);
  EXPECT_EQ(run("train --data " + q(dir_ / "none.data")).code, 2);
}

TEST_F(Cli, TrainEvalAndDeterminism) {
  const auto data = write_dataset("toy", 3);
  const std::string common = " --data " + q(data) + " --epochs 15 --seed 5";
  ASSERT_EQ(run("train" + common + " --out " + q(dir_ / "a.json")).code, 0);
  ASSERT_EQ(run("train" + common + " --out " + q(dir_ / "b.json")).code, 0);
  EXPECT_EQ(slurp(dir_ / "a.json"), slurp(dir_ / "b.json"));
  EXPECT_EQ(slurp(dir_ / "a.log.csv"), slurp(dir_ / "b.log.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a.manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "a.manifest.json"));
  EXPECT_EQ(manifest.at("dataset").at("rows"), 200);
  EXPECT_EQ(manifest.at("dataset").at("sha256").get<std::string>().size(), 64u);

  const auto eval = run("eval --json --model " + q(dir_ / "a.json") + " --data " + q(data));
  ASSERT_EQ(eval.code, 0);
  const auto j = nlohmann::json::parse(eval.out);
  EXPECT_EQ(j.at("total"), 200);
  EXPECT_LE(j.at("misclassification_rate").template get<double>(), 0.5);
}

TEST_F(Cli, ConfigFileIsOverriddenByFlags) {
  const auto data = write_dataset("toy", 2);
  std::ofstream(dir_ / "cfg.json") << R"({"epochs": 3})";
  ASSERT_EQ(run("train --data " + q(data) + " --config " + q(dir_ / "cfg.json") + " --out " +
                q(dir_ / "m.json")).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "m.manifest.json")).at("training").at("max_epochs"), 3);
  ASSERT_EQ(run("train --data " + q(data) + " --config " + q(dir_ / "cfg.json") +
                " --epochs 4 --out " + q(dir_ / "m.json")).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "m.manifest.json")).at("training").at("max_epochs"), 4);
  std::ofstream(dir_ / "bad.json") << R"({"epoch": 3})";
  EXPECT_EQ(run("train --data " + q(data) + " --config " + q(dir_ / "bad.json")).code, 2);
}

TEST_F(Cli, NonFiniteFieldIsDataError) {
  const auto data = write_dataset("poison", 3, true);
  EXPECT_EQ(run("train --data " + q(data) + " --out " + q(dir_ / "m.json")).code, 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("poison.data:8"), std::string::npos)
      << slurp(dir_ / "stderr.txt");
}

TEST_F(Cli, OverflowingFeaturesAreNumericFailures) {
  std::ofstream(dir_ / "big.data")
      << "1e308,0.1,yes\n-1e308,0.2,no\n0.5,0.3,yes\n0.1,-0.4,no\n0.3,0.3,yes\n-0.2,0.1,no\n";
  std::ofstream(dir_ / "big.schema.json")
      << R"({"name":"big","columns":[{"name":"a","kind":"numeric"},{"name":"b","kind":"numeric"},)"
      << R"({"name":"c","kind":"label","categories":["no","yes"]}]})";
  EXPECT_EQ(run("train --epochs 3 --data " + q(dir_ / "big.data") + " --out " +
                q(dir_ / "m.json")).code, 3);
}

TEST_F(Cli, ShapeMismatchIsContractError) {
  const auto three = write_dataset("three", 3);
  const auto four = write_dataset("four", 4);
  ASSERT_EQ(run("train --epochs 2 --data " + q(three) + " --out " + q(dir_ / "m.json")).code, 0);
  EXPECT_EQ(run("eval --model " + q(dir_ / "m.json") + " --data " + q(four)).code, 4);
}

TEST_F(Cli, ExtractPlantedConjunction) {
  auto net = plant_network(LogicExpr::binary(1.0, LogicExpr::input(0), LogicExpr::input(1)), 2);
  net.metadata.feature_names = {"age", "mass"};
  save_network(net, dir_ / "planted.json");
  const auto r = run("extract --model " + q(dir_ / "planted.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("output 0: (0) and (1)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("decisive 1.0000"), std::string::npos) << r.out;
  const auto named = run("extract --leaf-names --model " + q(dir_ / "planted.json"));
  EXPECT_NE(named.out.find("(age) and (mass)"), std::string::npos) << named.out;
  const auto js = run("extract --json --model " + q(dir_ / "planted.json"));
  const auto j = nlohmann::json::parse(js.out);
  EXPECT_EQ(j.at("outputs")[0].at("expression"), "(0) and (1)");
  EXPECT_EQ(j.at("outputs")[0].at("faithfulness").at("decisive_agreement"), 1.0);
}

TEST_F(Cli, ExtractConstantIsOmitted) {
  auto net = plant_network(LogicExpr::binary(0.5, LogicExpr::input(0), LogicExpr::input(1)), 2);
  net.mutable_selector(0).fill(0);
  save_network(net, dir_ / "constant.json");
  const auto r = run("extract --model " + q(dir_ / "constant.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("omitted: constant"), std::string::npos) << r.out;
}

TEST_F(Cli, PlotSquash) {
  const auto r = run("plot-squash");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,cut,beta_10,beta_50,beta_80");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2001u);
  ASSERT_EQ(run("plot-squash --out " + q(dir_ / "s.csv")).code, 0);
  EXPECT_EQ(slurp(dir_ / "s.csv"), r.out);
}

TEST_F(Cli, BenchmarkWithoutDataSkips) {
  fs::create_directories(dir_ / "empty");
  const auto r = run("benchmark --data-dir " + q(dir_ / "empty") + " --csv " + q(dir_ / "b.csv"));
  ASSERT_EQ(r.code, 0);
  const auto csv = slurp(dir_ / "b.csv");
  std::size_t skipped = 0;
  for (std::size_t p = csv.find("SKIPPED"); p != std::string::npos; p = csv.find("SKIPPED", p + 1)) {
    ++skipped;
  }
  EXPECT_EQ(skipped, 16u);
}
