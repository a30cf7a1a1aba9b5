#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "acrnn/checkpoint.hpp"
#include "acrnn/csv.hpp"
#include "acrnn/errors.hpp"
#include "acrnn_app/app.hpp"
#include "acrnn_app/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = acrnn::app::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("acrnn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream data(dir_ / "series.csv");
    data << "date,temp,rain\n";
    for (int t = 0; t < 120; ++t) {
      data << "d" << t << ',' << std::sin(t / 4.0) + 0.01 * t << ',' << std::cos(t / 6.0) << '\n';
    }
    std::ofstream config(dir_ / "config.json");
    config << R"({"data": {"skip_columns": 1},
                 "model": {"window": 8, "filters": 3, "kernel_size": 3, "gru_hidden": 4, "seed": 3},
                 "train": {"epochs": 3, "learning_rate": 0.01, "seed": 4},
                 "eval": {"folds": 3, "horizons": [3], "baselines": ["ridge", "persistence"]},
                 "synth": {"n_series": 10, "length": 40, "seed": 5},
                 "ablate": {"forecast_steps": 10, "seeds": 2}})";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::string> with_common(std::vector<std::string> args, const std::string& out) const {
    args.insert(args.end(), {"--config", (dir_ / "config.json").string(), "--out-dir", (dir_ / out).string()});
    return args;
  }

  fs::path dir_;
};

}  // namespace

TEST(Sha256, KnownDigest) {
  const fs::path p = fs::temp_directory_path() / "acrnn_sha_test.txt";
  std::ofstream(p) << "abc";
  EXPECT_EQ(acrnn::app::sha256_file(p), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove(p);
}

TEST(Config, JsonRoundTrip) {
  acrnn::app::RunConfig c;
  c.model.input_length = 32;
  c.eval.radius = std::nullopt;
  c.data.csv.delimiter = '\t';
  c.synth.slope_min = -0.2;
  const acrnn::app::RunConfig back = acrnn::app::config_from_json(acrnn::app::config_to_json(c));
  EXPECT_EQ(acrnn::app::config_to_json(back), acrnn::app::config_to_json(c));
  EXPECT_FALSE(back.eval.radius.has_value());
  EXPECT_EQ(back.data.csv.delimiter, '\t');
  EXPECT_THROW(acrnn::app::config_from_json(json::parse(R"({"eval": {"baselines": ["arima"]}})")),
               acrnn::ContractError);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"train", "--bogus"}).status, 2);
  EXPECT_EQ(run({"frobnicate"}).status, 2);
  const Result bad_window = run(with_common({"train", "--data", (dir_ / "series.csv").string(), "--window", "6"}, "o"));
  EXPECT_EQ(bad_window.status, 2);
  EXPECT_NE(bad_window.err.find("multiple of 4"), std::string::npos);
  EXPECT_EQ(run({"--help"}).status, 0);
}

TEST_F(Cli, MissingFileIsAFailure) {
  const Result r = run(with_common({"train", "--data", (dir_ / "absent.csv").string()}, "o"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos);
}

TEST_F(Cli, ParseErrorNamesTheCell) {
  std::ofstream(dir_ / "bad.csv") << "a,b\n1,2\n3,x\n";
  const Result r = run({"ingest-check", "--data", (dir_ / "bad.csv").string(), "--out-dir", (dir_ / "o").string()});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("row 3"), std::string::npos);
  EXPECT_NE(r.err.find("column 2"), std::string::npos);
}

TEST_F(Cli, TrainThenEvaluateReproducesValidationLoss) {
  const std::string data = (dir_ / "series.csv").string();
  ASSERT_EQ(run(with_common({"train", "--data", data}, "t")).status, 0);
  const acrnn::Checkpoint ck = acrnn::load_checkpoint(dir_ / "t" / "model.ckpt");
  EXPECT_EQ(ck.variable_names, (std::vector<std::string>{"temp", "rain"}));
  const std::string recorded = ck.metadata.at("train.best_val_mse");

  const Result eval =
      run(with_common({"evaluate", "--data", data, "--checkpoint", (dir_ / "t" / "model.ckpt").string()}, "e"));
  ASSERT_EQ(eval.status, 0) << eval.err;
  const auto rows = lines(slurp(dir_ / "e" / "evaluation.tsv"));
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0], "split\twindows\tmse\tmae");
  std::istringstream row(rows[1]);
  std::string split, windows, mse;
  std::getline(row, split, '\t');
  std::getline(row, windows, '\t');
  std::getline(row, mse, '\t');
  EXPECT_EQ(split, "validation");
  EXPECT_EQ(mse, recorded);

  const auto history = lines(slurp(dir_ / "t" / "history.tsv"));
  EXPECT_EQ(history[0], "epoch\ttrain_mse\tval_mse");
  EXPECT_EQ(history.size(), 4u);
}

TEST_F(Cli, ForecastWritesLongFormatTrace) {
  const std::string data = (dir_ / "series.csv").string();
  ASSERT_EQ(run(with_common({"train", "--data", data, "--horizon", "2"}, "t")).status, 0);
  const Result r = run(with_common(
      {"forecast", "--data", data, "--checkpoint", (dir_ / "t" / "model.ckpt").string(), "--steps", "5"}, "f"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = lines(slurp(dir_ / "f" / "forecast.tsv"));
  EXPECT_EQ(rows[0], "step\tseries\tvalue");
  EXPECT_EQ(rows.size(), 1u + 5 * 2);
  EXPECT_EQ(rows[1].substr(0, 9), "120\ttemp\t");
}

TEST_F(Cli, CrossvalTableLayoutAndDeterminism) {
  const std::string data = (dir_ / "series.csv").string();
  ASSERT_EQ(run(with_common({"crossval", "--data", data}, "a")).status, 0);
  ASSERT_EQ(run(with_common({"crossval", "--data", data}, "b")).status, 0);
  const std::string table = slurp(dir_ / "a" / "metrics.tsv");
  EXPECT_EQ(table, slurp(dir_ / "b" / "metrics.tsv"));

  const auto rows = lines(table);
  EXPECT_EQ(rows[0], "model\tfold\tmse\tmae\tdtw@3\tmse:temp\tmse:rain");
  ASSERT_EQ(rows.size(), 1u + 3 * (3 + 1));
  EXPECT_EQ(rows[1].substr(0, 8), "acrnn\t1\t");
  EXPECT_EQ(rows[4].substr(0, 15), "acrnn\tmean±std");
  EXPECT_EQ(rows[5].substr(0, 8), "ridge\t1\t");
  EXPECT_EQ(rows[12].substr(0, 21), "persistence\tmean±std");
}

TEST_F(Cli, ManifestReferencesEveryArtifactAndReproduces) {
  const std::string data = (dir_ / "series.csv").string();
  ASSERT_EQ(run(with_common({"crossval", "--data", data, "--seed", "11", "--radius", "2"}, "m")).status, 0);
  const json manifest = json::parse(slurp(dir_ / "m" / "manifest.json"));
  EXPECT_EQ(manifest["command"], "crossval");
  EXPECT_EQ(manifest["seeds"]["model"], 11);
  EXPECT_EQ(manifest["config"]["eval"]["radius"], 2);
  EXPECT_EQ(manifest["inputs"][0]["sha256"], acrnn::app::sha256_file(data));

  std::set<std::string> listed;
  for (const auto& a : manifest["artifacts"]) listed.insert(fs::path(a.get<std::string>()).filename().string());
  for (const auto& entry : fs::directory_iterator(dir_ / "m")) {
    EXPECT_TRUE(listed.contains(entry.path().filename().string())) << entry.path();
  }
  EXPECT_TRUE(manifest["timings_seconds"].contains("total"));

  // The manifest itself is a valid config carrying the overrides.
  ASSERT_EQ(run({"crossval", "--config", (dir_ / "m" / "manifest.json").string(), "--out-dir", (dir_ / "r").string()})
                .status,
            0);
  EXPECT_EQ(slurp(dir_ / "r" / "metrics.tsv"), slurp(dir_ / "m" / "metrics.tsv"));
}

TEST_F(Cli, SynthGenExportsIngestableCorpus) {
  ASSERT_EQ(run(with_common({"synth-gen"}, "s")).status, 0);
  const acrnn::SeriesFrame f = acrnn::ingest_csv(dir_ / "s" / "corpus.csv");
  EXPECT_EQ(f.variables(), 10u);
  EXPECT_EQ(f.length(), 40u);
  EXPECT_EQ(lines(slurp(dir_ / "s" / "components.tsv")).size(), 11u);
}

TEST_F(Cli, SynthAblateEmitsPairsAndTrace) {
  const Result r = run(with_common({"synth-ablate", "--window", "12"}, "x"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = lines(slurp(dir_ / "x" / "ablation.tsv"));
  EXPECT_EQ(rows[0], "seed\tarm\tmse\tdtw");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NE(rows[1].find("with_shortcut"), std::string::npos);
  EXPECT_NE(rows[2].find("without_shortcut"), std::string::npos);

  const auto trace = lines(slurp(dir_ / "x" / "trace.tsv"));
  EXPECT_EQ(trace[0], "step\tseries\tvalue");
  // Per seed: 40 truth rows and 10 rows per arm.
  EXPECT_EQ(trace.size(), 1u + 2 * (40 + 2 * 10));
  EXPECT_TRUE(fs::exists(dir_ / "x" / "ablation_summary.tsv"));
}
