#include <gtest/gtest.h>

#include "imt/decoder.hpp"
#include "imt/errors.hpp"
#include "imt/toy_model.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "support/test_scorers.hpp"

namespace imt {
namespace {

using testing::FunctionScorer;

// w0 -> w1 -> w2 -> </s>, whatever the source.
FunctionScorer chain_scorer() {
  const Vocabulary vocab = testing::small_vocab(3);
  return FunctionScorer(vocab, [](const TokenSeq&, const TokenSeq& prefix) {
    LogDist d(5, std::log(0.1 / 4));
    const std::size_t next = prefix.size() < 3 ? 2 + prefix.size() : 0;
    d[next] = std::log(0.9);
    return d;
  });
}

ToyModel sample_model() {
  ToyModelTables t;
  t.lambda = 0.5;
  t.alpha = 0.1;
  t.lex["el"] = {{"the", 0.9}, {"it", 0.1}};
  t.lex["perro"] = {{"dog", 1.0}};
  t.bigram["<s>"] = {{"the", 0.8}, {"it", 0.2}};
  t.bigram["the"] = {{"dog", 1.0}};
  t.bigram["dog"] = {{"</s>", 1.0}};
  return ToyModel(t);
}

ValidatedSegment seg(const std::string& text, SegmentKind kind = SegmentKind::validated) {
  return {TokenSeq::from_text(text), kind, std::nullopt};
}

TEST(Decode, FollowsDeterministicChain) {
  const auto scorer = chain_scorer();
  const Hypothesis h = decode(TokenSeq({"x"}), scorer, {});
  EXPECT_EQ(h.tokens.text(), "w0 w1 w2");
  EXPECT_EQ(h.forced_count(), 0u);
  ASSERT_TRUE(h.well_formed());
  for (double lp : h.token_logprobs) EXPECT_DOUBLE_EQ(lp, std::log(0.9));
}

TEST(Decode, RespectsLengthCap) {
  const auto scorer = chain_scorer();
  DecoderConfig config;
  config.max_total_len = 2;
  EXPECT_EQ(decode(TokenSeq({"x"}), scorer, config).tokens.text(), "w0 w1");
  config.max_total_len = 0;
  EXPECT_THROW(decode(TokenSeq({"x"}), scorer, config), InvalidArgument);
}

TEST(Decode, DefaultCapIsTwiceSourcePlusFive) {
  EXPECT_EQ(DecoderConfig{}.total_len_for(TokenSeq({"a", "b", "c"})), 11u);
  // A scorer that never ends stops at the cap.
  const FunctionScorer endless(testing::small_vocab(1), [](const TokenSeq&, const TokenSeq&) {
    return LogDist{std::log(0.1), std::log(0.1), std::log(0.8)};
  });
  EXPECT_EQ(decode(TokenSeq({"a", "b"}), endless, {}).size(), 9u);
}

TEST(Decode, ToyModelMatchesStepwiseArgmax) {
  const ToyModel model = sample_model();
  const TokenSeq src({"el", "perro"}, Side::source);
  const Hypothesis h = decode(src, model, {});
  EXPECT_EQ(h.tokens, testing::greedy_continuation(model, src, TokenSeq(), 9));
  EXPECT_EQ(h.tokens.text(), "the dog");
}

TEST(Decode, EqualsConstrainedDecodeWithoutFeedback) {
  const ToyModel model = sample_model();
  for (const char* src : {"el perro", "perro", "el el perro gato"}) {
    const TokenSeq s = TokenSeq::from_text(src, Side::source);
    EXPECT_EQ(decode(s, model, {}), constrained_decode(s, Feedback{}, model, {})) << src;
  }
}

TEST(FillGap, ZeroLengthWhenAnchorIsAlreadyLikely) {
  const auto scorer = chain_scorer();
  const GapFill fill = fill_gap(TokenSeq({"x"}), TokenSeq({"w0"}), GapAnchor::before("w1"), scorer, {}, 5);
  EXPECT_TRUE(fill.tokens.empty());
  EXPECT_DOUBLE_EQ(fill.anchored_logprob, std::log(0.9));
}

TEST(FillGap, BridgesToTheAnchor) {
  const auto scorer = chain_scorer();
  const GapFill fill = fill_gap(TokenSeq({"x"}), TokenSeq(), GapAnchor::before("w2"), scorer, {}, 5);
  EXPECT_EQ(fill.tokens.text(), "w0 w1");
  EXPECT_DOUBLE_EQ(fill.anchored_logprob, 3 * std::log(0.9));
  EXPECT_DOUBLE_EQ(fill.anchor_logprob, std::log(0.9));
}

TEST(FillGap, GapLengthLimitedByMAndBudget) {
  const auto scorer = chain_scorer();
  DecoderConfig config;
  config.max_gap_len = 1;
  EXPECT_EQ(fill_gap(TokenSeq({"x"}), TokenSeq(), GapAnchor::before("w2"), scorer, config, 5).tokens.size(), 0u);
  config.max_gap_len = 5;
  EXPECT_EQ(fill_gap(TokenSeq({"x"}), TokenSeq(), GapAnchor::before("w2"), scorer, config, 1).tokens.size(), 0u);
}

TEST(FillGap, TiesKeepTheShorterGap) {
  // w0 is certain first, w1 certain afterwards, so W = 1 and W = 2 tie.
  const FunctionScorer flat(testing::small_vocab(2), [](const TokenSeq&, const TokenSeq& prefix) {
    LogDist d(4, kLogZero);
    d[2] = 0.0;
    if (prefix.size() >= 1) d[3] = 0.0, d[2] = kLogZero;
    return d;
  });
  const GapFill fill = fill_gap(TokenSeq({"x"}), TokenSeq(), GapAnchor::before("w1"), flat, {}, 5);
  EXPECT_EQ(fill.tokens.text(), "w0");
  EXPECT_EQ(fill.anchored_logprob, 0.0);
}

TEST(FillGap, FinalGapStopsAtEndMarker) {
  const auto scorer = chain_scorer();
  const GapFill fill = fill_gap(TokenSeq({"x"}), TokenSeq({"w0"}), GapAnchor::end(), scorer, {}, 10);
  EXPECT_EQ(fill.tokens.text(), "w1 w2");
  EXPECT_TRUE(fill.terminated);
  const GapFill cut = fill_gap(TokenSeq({"x"}), TokenSeq({"w0"}), GapAnchor::end(), scorer, {}, 1);
  EXPECT_EQ(cut.tokens.text(), "w1");
  EXPECT_FALSE(cut.terminated);
}

TEST(FillGap, MatchesExhaustiveEnumeration) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto failure = testing::gap_search_case(seed);
    EXPECT_FALSE(failure) << *failure;
  }
}

TEST(ConstrainedDecode, WorkedExampleShape) {
  const auto scorer = testing::worked_example_scorer();
  const auto& ex = testing::worked_example();
  const Feedback fb{{seg("Indiana"), seg("was", SegmentKind::correction), seg("State to impose")}};
  const Hypothesis h = constrained_decode(ex.source, fb, scorer, {});
  EXPECT_EQ(h.tokens, ex.hypotheses[1]);
  const std::string prov = [&] {
    std::string s;
    for (auto p : h.provenance) s.push_back(static_cast<char>(p));
    return s;
  }();
  EXPECT_EQ(prov, "ffggfffggg");
}

TEST(ConstrainedDecode, ClosedStartPinsFirstSegment) {
  const auto scorer = chain_scorer();
  const Feedback fb{{seg("w2")}};
  EXPECT_EQ(constrained_decode(TokenSeq({"x"}), fb, scorer, {}).tokens.text(), "w2 w1 w2");
  Feedback open = fb;
  open.open_start = true;
  EXPECT_EQ(constrained_decode(TokenSeq({"x"}), open, scorer, {}).tokens.text(), "w0 w1 w2");
}

TEST(ConstrainedDecode, ForcedTokensCarryModelLogProbs) {
  const auto scorer = chain_scorer();
  const Feedback fb{{seg("w1 w2")}};
  const Hypothesis h = constrained_decode(TokenSeq({"x"}), fb, scorer, {});
  ASSERT_GE(h.size(), 2u);
  EXPECT_DOUBLE_EQ(h.token_logprobs[0], std::log(0.1 / 4));
  EXPECT_DOUBLE_EQ(h.token_logprobs[1], std::log(0.1 / 4));
}

TEST(ConstrainedDecode, RejectsBadFeedbackAndOverlongForcedText) {
  const auto scorer = chain_scorer();
  EXPECT_THROW(constrained_decode(TokenSeq({"x"}), Feedback{{seg("a b", SegmentKind::correction)}}, scorer, {}),
               InvalidArgument);
  DecoderConfig config;
  config.max_total_len = 2;
  EXPECT_THROW(constrained_decode(TokenSeq({"x"}), Feedback{{seg("w0 w1 w2")}}, scorer, config), InvalidArgument);
  EXPECT_THROW(constrained_decode(TokenSeq(), Feedback{}, scorer, {}), InvalidArgument);
}

TEST(ConstrainedDecode, ForcedTextExactlyFillingTheCap) {
  const auto scorer = chain_scorer();
  DecoderConfig config;
  config.max_total_len = 3;
  const Hypothesis h = constrained_decode(TokenSeq({"x"}), Feedback{{seg("w2"), seg("w2 w2")}}, scorer, config);
  EXPECT_EQ(h.tokens.text(), "w2 w2 w2");
}

TEST(ConstrainedDecode, SegmentsAlwaysIncluded) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto failure = testing::segment_inclusion_case(seed);
    EXPECT_FALSE(failure) << *failure;
  }
}

TEST(ConstrainedDecode, MatchesEnumerationDecoder) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto failure = testing::skeleton_decode_case(seed);
    EXPECT_FALSE(failure) << *failure;
  }
}

}  // namespace
}  // namespace imt
