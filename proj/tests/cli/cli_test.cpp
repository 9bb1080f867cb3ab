#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "posh/datasets.hpp"
#include "posh/model_io.hpp"
#include "posh/report.hpp"
#include "posh/sparse_index.hpp"

namespace posh::cli {
namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("posh_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
    std::ofstream(path("config.json")) << R"({
      "dataset": {"source": "synthetic", "classes": 5, "per_class": 120, "d": 16, "queries": 50},
      "method": "posh", "D": 128, "alpha": 8,
      "train": {"epochs": 2, "train_size": 300},
      "eval": {"n": 20, "trials": 3}
    })";
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run_cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  std::filesystem::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli, TrainWritesParsableModelAndTrace) {
  ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--out", path("m.posh")}), 0)
      << err_.str();
  const HashModel m = load_model(path("m.posh"));
  EXPECT_EQ(m.code_length(), 128U);
  EXPECT_EQ(m.alpha, 8U);
  EXPECT_EQ(out_.str().rfind("epoch\tobjective\n0\t", 0), 0U);
  EXPECT_NE(out_.str().find("\n2\t"), std::string::npos);
}

TEST_F(Cli, TrainIsByteDeterministic) {
  ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--out", path("a.posh")}), 0);
  ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--out", path("b.posh"),
                     "--threads", "3"}), 0);
  EXPECT_EQ(slurp(path("a.posh")), slurp(path("b.posh")));
  ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--out", path("c.posh"),
                     "--seed", "5"}), 0);
  EXPECT_NE(slurp(path("a.posh")), slurp(path("c.posh")));
}

TEST_F(Cli, ConfigErrorsExitTwoAndWriteNothing) {
  EXPECT_EQ(run_cli({"train", "--config", path("config.json"), "--set", "alpha=500", "--out",
                     path("bad.posh")}), 2);
  EXPECT_NE(err_.str().find("alpha"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(path("bad.posh")));
  EXPECT_EQ(run_cli({"train", "--config", path("config.json"), "--set", "train.epoch=3",
                     "--out", path("bad.posh")}), 2);
  EXPECT_NE(err_.str().find("unknown config key 'train.epoch'"), std::string::npos);
  EXPECT_EQ(run_cli({"train", "--config", path("config.json"), "--set", "D=\"many\"",
                     "--out", path("bad.posh")}), 2);
  EXPECT_EQ(run_cli({"train", "--config", path("missing.json"), "--out", path("bad.posh")}), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 2);
  EXPECT_EQ(run_cli({}), 2);
  EXPECT_FALSE(std::filesystem::exists(path("bad.posh")));
}

TEST_F(Cli, IndexThenQueryFindsOwnVector) {
  ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--out", path("m.posh")}), 0);
  const Dataset data = synth_gaussian_mixture(3, 40, 16, 4.0, 1.0, 9);
  write_fvecs(path("data.fvecs"), data.features);
  ASSERT_EQ(run_cli({"index", "--model", path("m.posh"), "--data", path("data.fvecs"), "--out",
                     path("i.spix")}), 0)
      << err_.str();
  EXPECT_EQ(load_index(path("i.spix")).size(), 120U);

  write_fvecs(path("q.fvecs"), data.features.middleRows(7, 3));
  ASSERT_EQ(run_cli({"query", "--model", path("m.posh"), "--index", path("i.spix"), "--queries",
                     path("q.fvecs"), "--k", "1"}), 0)
      << err_.str();
  // float32 storage is exact for the round trip, so each query hashes to the
  // code of its own row; ties at distance 0 resolve to the lowest id
  std::istringstream lines(out_.str());
  std::string line;
  for (int q = 0; q < 3; ++q) {
    ASSERT_TRUE(std::getline(lines, line));
    const auto tab = line.find('\t');
    const auto colon = line.find(':');
    const std::uint64_t id = std::stoull(line.substr(tab + 1, colon - tab - 1));
    EXPECT_EQ(line.substr(colon + 1), "0");
    EXPECT_LE(id, static_cast<std::uint64_t>(7 + q));
  }
}

TEST_F(Cli, QueryReportsLocatedParseErrors) {
  ASSERT_EQ(run_cli({"train", "--config", path("config.json"), "--out", path("m.posh")}), 0);
  std::ofstream(path("junk.spix")) << "SPIX1abc";
  std::ofstream(path("q.csv")) << "a\n1\n";
  EXPECT_EQ(run_cli({"query", "--model", path("m.posh"), "--index", path("junk.spix"),
                     "--queries", path("q.csv")}), 1);
  EXPECT_NE(err_.str().find("byte"), std::string::npos);
}

TEST_F(Cli, EvalEmitsReportWithEveryTrial) {
  ASSERT_EQ(run_cli({"eval", "--config", path("config.json"), "--out", path("r.json")}), 0)
      << err_.str();
  EXPECT_NE(out_.str().find("ci95"), std::string::npos);
  const EvalReport r = report_from_json(slurp(path("r.json")));
  EXPECT_EQ(r.per_trial.size(), 3U);
  EXPECT_TRUE(r.synthetic);
  EXPECT_EQ(r.n, 20U);
  ASSERT_EQ(run_cli({"eval", "--config", path("config.json"), "--json"}), 0);
  EXPECT_EQ(report_from_json(out_.str()).per_trial, r.per_trial);
}

TEST_F(Cli, GramcheckNearBinomialMean) {
  ASSERT_EQ(run_cli({"gramcheck", "--D", "1024", "--d", "64", "--p", "0.2", "--samples", "30"}),
            0);
  std::istringstream lines(out_.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  double observed = 0, se = 0, expected = 0;
  ASSERT_EQ(std::sscanf(row.c_str(), "diag_mean\t%lf\t%lf\t%lf", &observed, &se, &expected), 3);
  EXPECT_DOUBLE_EQ(expected, 204.8);
  EXPECT_NEAR(observed, expected, 3 * se);
}

TEST_F(Cli, SchemaIsValidJsonListingTopLevelKeys) {
  ASSERT_EQ(run_cli({"schema"}), 0);
  const auto schema = nlohmann::json::parse(out_.str());
  EXPECT_TRUE(schema.dump().find("\"dataset\"") != std::string::npos);
  EXPECT_TRUE(schema.dump().find("\"refinement\"") != std::string::npos);
}

TEST_F(Cli, BenchPrintsThroughput) {
  ASSERT_EQ(run_cli({"bench", "--config", path("config.json"), "--k", "5"}), 0) << err_.str();
  EXPECT_NE(out_.str().find("qps\t"), std::string::npos);
  EXPECT_NE(out_.str().find("latency_p99_us\t"), std::string::npos);
}

TEST(Config, OverridesAndSchema) {
  nlohmann::json doc = nlohmann::json::parse(R"({"method": "posh"})");
  apply_overrides(doc, {"train.epochs=7", "method=fruitfly", "dataset.name=x y"});
  EXPECT_EQ(doc["train"]["epochs"], 7);
  EXPECT_EQ(doc["method"], "fruitfly");
  EXPECT_EQ(doc["dataset"]["name"], "x y");
  const RunConfig rc = parse_config(doc);
  EXPECT_EQ(rc.experiment.train.epochs, 7U);
  EXPECT_EQ(rc.experiment.method, "fruitfly");
  EXPECT_THROW(apply_overrides(doc, {"novalue"}), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"dataset": 3})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"D": -4})")), ConfigError);
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"refinement": {"mode": "magic"}})")),
               ConfigError);
  EXPECT_TRUE(config_schema().contains("coarse"));
}

}  // namespace
}  // namespace posh::cli
