#include <gtest/gtest.h>

#include "imt/corpus_io.hpp"
#include "imt/errors.hpp"
#include "imt/metrics.hpp"
#include "support/temp_dir.hpp"
#include "support/test_scorers.hpp"

namespace imt {
namespace {

using testing::TempDir;

std::size_t error_line(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(Normalize, ComposesToNfc) {
  EXPECT_EQ(normalize_nfc("cafe\xCC\x81"), "caf\xC3\xA9");
  EXPECT_EQ(normalize_nfc("plain"), "plain");
  EXPECT_THROW(normalize_nfc("bad\xFF"), Error);
}

TEST(Normalize, LowercasesUnicode) { EXPECT_EQ(lowercase_utf8("ÉL Perro"), "él perro"); }

TEST(LoadSentences, TokenizesAndNormalizes) {
  TempDir dir;
  const auto p = dir.write("s.txt", "\xEF\xBB\xBFla casa\r\ncafe\xCC\x81 con  leche\n");
  const auto sents = load_sentences(p, Side::source);
  ASSERT_EQ(sents.size(), 2u);
  EXPECT_EQ(sents[0].text(), "la casa");
  EXPECT_EQ(sents[1][0], "caf\xC3\xA9");
  EXPECT_EQ(sents[1].char_count(), 14u);
  EXPECT_EQ(sents[0].side(), Side::source);
}

TEST(LoadSentences, LowercaseOption) {
  TempDir dir;
  const auto p = dir.write("s.txt", "La Casa\n");
  EXPECT_EQ(load_sentences(p, Side::target, {true})[0].text(), "la casa");
}

TEST(LoadSentences, EmptyLineAndBadEncodingReportTheirLine) {
  TempDir dir;
  const auto empty = dir.write("e.txt", "one\n\nthree\n");
  EXPECT_EQ(error_line([&] { load_sentences(empty, Side::source); }), 2u);
  const auto bad = dir.write("b.txt", "one\ntwo\nth\xC3ree\n");
  EXPECT_EQ(error_line([&] { load_sentences(bad, Side::source); }), 3u);
  EXPECT_THROW(load_sentences(dir.path() / "missing.txt", Side::source), Error);
}

TEST(LoadParallel, PairsLinesAndChecksCounts) {
  TempDir dir;
  const auto src = dir.write("c.es", "la casa\nel perro\n");
  const auto tgt = dir.write("c.en", "the house\nthe dog\n");
  const ParallelCorpus corpus = load_parallel(src, tgt);
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus.name, "c");
  EXPECT_EQ(corpus.pairs[1].reference.text(), "the dog");
  const auto short_tgt = dir.write("d.en", "the house\n");
  try {
    load_parallel(src, short_tgt);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line count 2 != 1"), std::string::npos);
  }
}

TEST(LoadParallelTsv, ReportsFieldProblems) {
  TempDir dir;
  const auto good = dir.write("g.tsv", "la casa\tthe house\n");
  EXPECT_EQ(load_parallel_tsv(good).pairs[0].source.text(), "la casa");
  const auto missing = dir.write("m.tsv", "a\tb\nno tab here\n");
  EXPECT_EQ(error_line([&] { load_parallel_tsv(missing); }), 2u);
  const auto extra = dir.write("x.tsv", "a\tb\tc\n");
  try {
    load_parallel_tsv(extra);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("extra field at line 1"), std::string::npos);
  }
}

TEST(SessionJson, RoundTripsAWorkedSession) {
  const auto& ex = testing::worked_example();
  const auto scorer = testing::worked_example_scorer();
  const SessionLog log = run_session(ex.source, ex.reference, scorer, {});
  const SessionLog back = session_from_json(session_to_json(log));
  EXPECT_EQ(back, log);

  const auto j = session_to_json(log);
  EXPECT_EQ(j["totals"]["ma"], 10);
  EXPECT_EQ(j["iterations"][0]["provenance"], "ggggggggg");
  EXPECT_EQ(j["iterations"][0]["feedback"][1]["kind"], "correction");
  EXPECT_EQ(j["iterations"][0]["feedback"][3]["ref_span"], nlohmann::ordered_json({4, 6}));
}

TEST(SessionJson, JsonLinesFileRoundTrip) {
  TempDir dir;
  const auto& ex = testing::worked_example();
  const auto scorer = testing::worked_example_scorer();
  const std::vector<SessionLog> logs{run_session(ex.source, ex.reference, scorer, {}),
                                     run_session(ex.source, ex.hypotheses[1], scorer, {})};
  const auto path = dir.path() / "logs.jsonl";
  write_session_logs(logs, path);
  EXPECT_EQ(read_session_logs(path), logs);
  append_session_log(logs[0], path);
  EXPECT_EQ(read_session_logs(path).size(), 3u);
}

TEST(SessionJson, MalformedLineIsReported) {
  TempDir dir;
  const auto path = dir.write("bad.jsonl", "\n{\"source\": [\"a\"]}\n");
  EXPECT_EQ(error_line([&] { read_session_logs(path); }), 2u);
  const auto garbage = dir.write("garbage.jsonl", "{nope\n");
  EXPECT_EQ(error_line([&] { read_session_logs(garbage); }), 1u);
}

TEST(Reports, JsonAndCsvAgree) {
  CorpusScores s;
  s.bleu = 12.5;
  s.ter = 50.0;
  s.wsr = 30.0;
  s.ksr = 2000.0 / 57;
  s.mar = 1000.0 / 57;
  s.sentences = 1;
  const std::string json = report_json(s);
  const auto parsed = nlohmann::ordered_json::parse(json);
  std::vector<std::string> keys;
  for (const auto& [k, _] : parsed.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"bleu", "ter", "wsr", "ksr", "mar", "sentences"}));
  EXPECT_EQ(parsed["ksr"].get<double>(), s.ksr);
  const std::string csv = report_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bleu,ter,wsr,ksr,mar,sentences");
  EXPECT_NE(csv.find(parsed["ksr"].dump()), std::string::npos);
}

}  // namespace
}  // namespace imt
