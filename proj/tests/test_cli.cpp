#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "imt/cli.hpp"
#include "imt/corpus_io.hpp"
#include "imt/metrics.hpp"
#include "imt/toy_model.hpp"
#include "support/temp_dir.hpp"

namespace imt {
namespace {

const std::string kData = IMT_DATA_DIR;
const std::string kModel = kData + "/toy/model.txt";
const std::string kSrc = kData + "/toy/corpus.es";
const std::string kTgt = kData + "/toy/corpus.en";
const std::string kTsv = kData + "/toy/corpus.tsv";

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "imt");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_NE(run({"--help"}).out.find("simulate"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"score", "--hyp", "a", "--ref", "b", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"simulate", "--model", kModel}).code, kExitUsage);
}

TEST(Cli, TranslateMatchesDecoder) {
  const CliRun r = run({"translate", "--input", kSrc, "--model", kModel});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const ToyModel model = load_toy_model(kModel);
  std::string expected;
  for (const auto& src : load_sentences(kSrc, Side::source)) expected += decode(src, model, {}).tokens.text() + "\n";
  EXPECT_EQ(r.out, expected);
}

TEST(Cli, DataErrorsExitTwo) {
  testing::TempDir dir;
  const auto empty = dir.write("empty.txt", "");
  EXPECT_EQ(run({"translate", "--input", empty.string(), "--model", kModel}).code, kExitData);
  EXPECT_EQ(run({"translate", "--input", kSrc, "--model", (dir.path() / "none.txt").string()}).code, kExitData);
  const auto gap = dir.write("gap.txt", "a\n\nb\n");
  const CliRun r = run({"translate", "--input", gap.string(), "--model", kModel});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  EXPECT_EQ(run({"score", "--hyp", empty.string(), "--ref", kTgt}).code, kExitData);
}

TEST(Cli, SimulateReportsAllMetricsDeterministically) {
  testing::TempDir dir;
  const auto log1 = (dir.path() / "a.jsonl").string();
  const auto log2 = (dir.path() / "b.jsonl").string();
  const CliRun a = run({"simulate", "--src", kSrc, "--tgt", kTgt, "--model", kModel, "--log", log1});
  const CliRun b = run({"simulate", "--tsv", kTsv, "--model", kModel, "--log", log2, "--threads", "4"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(testing::TempDir::read(log1), testing::TempDir::read(log2));
  const auto report = nlohmann::json::parse(a.out);
  for (const char* key : {"bleu", "ter", "wsr", "ksr", "mar"}) EXPECT_TRUE(report[key].is_number()) << key;
  EXPECT_EQ(report["sentences"], 20);
  EXPECT_EQ(read_session_logs(log1).size(), 20u);
}

TEST(Cli, SimulateWritesFilesAndCsv) {
  testing::TempDir dir;
  const auto out = (dir.path() / "r.json").string();
  const auto csv = (dir.path() / "r.csv").string();
  const CliRun r = run({"simulate", "--tsv", kTsv, "--model", kModel, "--out", out, "--csv", csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(testing::TempDir::read(csv).rfind("bleu,ter,wsr,ksr,mar,sentences\n", 0), 0u);
  EXPECT_NO_THROW(nlohmann::json::parse(testing::TempDir::read(out)));
}

TEST(Cli, CorpusFlagsMustBeComplete) {
  EXPECT_EQ(run({"simulate", "--src", kSrc, "--model", kModel}).code, kExitUsage);
  EXPECT_EQ(run({"simulate", "--src", kSrc, "--tgt", kTgt, "--tsv", kTsv, "--model", kModel}).code, kExitUsage);
}

TEST(Cli, ModelFromEnvironment) {
  ::setenv("IMT_MODEL_PATH", kModel.c_str(), 1);
  const CliRun r = run({"translate", "--input", kSrc});
  ::unsetenv("IMT_MODEL_PATH");
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(Cli, ConfigFileSuppliesDefaultsAndFlagsWin) {
  testing::TempDir dir;
  const auto cfg = dir.write("imt.cfg", "# defaults\nmodel = " + kModel + "\nmax-len = 2\n");
  const CliRun r = run({"translate", "--input", kSrc, "--config", cfg.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) EXPECT_LE(TokenSeq::from_text(line).size(), 2u);
  const CliRun longer = run({"translate", "--input", kSrc, "--config", cfg.string(), "--max-len", "40"});
  ASSERT_EQ(longer.code, kExitOk) << longer.err;
  EXPECT_NE(longer.out, r.out);
  EXPECT_EQ(run({"translate", "--input", kSrc, "--config", (dir.path() / "nope.cfg").string()}).code, kExitUsage);
}

TEST(Cli, ScoreMatchesLibrary) {
  const CliRun r = run({"score", "--hyp", kTgt, "--ref", kTgt});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["bleu"], 100.0);
  EXPECT_EQ(j["ter"], 0.0);
  EXPECT_EQ(j["sentences"], 20);
}

TEST(Cli, TuneGapPicksSmallestKsr) {
  const CliRun single = run({"tune-gap", "--dev-corpus", kTsv, "--model", kModel, "--max-gap-range", "0..0"});
  ASSERT_EQ(single.code, kExitOk) << single.err;
  EXPECT_EQ(nlohmann::json::parse(single.out)["best_max_gap"], 0);

  const CliRun sweep = run({"tune-gap", "--dev-corpus", kTsv, "--model", kModel, "--max-gap-range", "0..3"});
  ASSERT_EQ(sweep.code, kExitOk) << sweep.err;
  const auto j = nlohmann::json::parse(sweep.out);

  // Rerun every M through the library and compare.
  const ToyModel model = load_toy_model(kModel);
  const ParallelCorpus corpus = load_parallel_tsv(kTsv);
  std::size_t best = 0;
  double best_ksr = 1e300;
  for (std::size_t m = 0; m <= 3; ++m) {
    DecoderConfig config;
    config.max_gap_len = m;
    const double ksr = effort_metrics(simulate_corpus(corpus, model, config, {})).ksr;
    EXPECT_EQ(j["sweep"][m]["ksr"].get<double>(), ksr);
    if (ksr < best_ksr) best_ksr = ksr, best = m;
  }
  EXPECT_EQ(j["best_max_gap"], best);

  EXPECT_EQ(run({"tune-gap", "--dev-corpus", kTsv, "--model", kModel, "--max-gap-range", "3..1"}).code, kExitUsage);
  EXPECT_EQ(run({"tune-gap", "--dev-corpus", kTsv, "--model", kModel, "--max-gap-range", "a..b"}).code, kExitUsage);
}

TEST(Cli, ServeRejectsBadPort) {
  EXPECT_EQ(run({"serve", "--model", kModel, "--port", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"serve", "--model", kModel, "--port", "70000"}).code, kExitUsage);
}

}  // namespace
}  // namespace imt
