#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "imt/core.hpp"
#include "imt/simulator.hpp"

namespace imt {

struct BleuOptions {
  // Replaces a zero n-gram match count by epsilon. Off unless set.
  std::optional<double> smooth_epsilon;
};

// Corpus BLEU (n = 1..4) in percent: clipped n-gram counts summed over the
// corpus, geometric mean of the four precisions, brevity penalty
// exp(1 - r/c) when c < r. Any zero precision yields 0 without smoothing.
// Throws InvalidArgument on an empty corpus or mismatched list sizes.
double bleu(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references,
            const BleuOptions& options = {});

struct TerResult {
  std::size_t shifts = 0;
  std::size_t edits = 0;  // insertions + deletions + substitutions after shifting
  std::size_t ref_len = 0;

  double score() const noexcept {
    return 100.0 * static_cast<double>(shifts + edits) / static_cast<double>(ref_len);
  }
};

// Longest block (in words) the shift search may move.
inline constexpr std::size_t kMaxShiftBlock = 10;

// Word-level Levenshtein distance.
std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b);

// TER with greedy shifts. Each round tries every block of the hypothesis that
// occurs verbatim in the reference (start ascending, then length ascending,
// then destination ascending) and applies the first move with the largest
// strict drop in edit distance; rounds stop when no move helps.
// Throws InvalidArgument when the reference is empty.
TerResult ter_stats(const TokenSeq& hypothesis, const TokenSeq& reference);
double ter(const TokenSeq& hypothesis, const TokenSeq& reference);
// Sum of edits over sum of reference lengths, in percent.
double corpus_ter(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references);

struct EffortRatios {
  double wsr = 0.0;
  double ksr = 0.0;
  double mar = 0.0;
};

// Micro-averaged effort ratios in percent:
//   WSR = sum word strokes / sum words(final)
//   KSR = sum key strokes / sum chars(final)
//   MAR = sum mouse actions / sum chars(final)
// chars counts code points plus single separating spaces.
// Throws InvalidArgument for an empty list or a session that did not end on
// its reference.
EffortRatios effort_metrics(std::span<const SessionLog> logs);

struct CorpusScores {
  double bleu = 0.0;
  double ter = 0.0;
  double wsr = 0.0;
  double ksr = 0.0;
  double mar = 0.0;
  std::size_t sentences = 0;
};

// BLEU/TER of the initial hypotheses plus effort ratios of the sessions.
CorpusScores score_sessions(std::span<const SessionLog> logs, const BleuOptions& options = {});

}  // namespace imt
