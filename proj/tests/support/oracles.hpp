#pragma once

// Slow, direct reimplementations used as test oracles. None of them calls
// into the code under test except for the scorer interface.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "imt/core.hpp"
#include "imt/scorer.hpp"

namespace imt::testing {

// Longest common subsequence length by enumerating every subsequence of `a`.
std::size_t brute_lcs_length(const TokenSeq& a, const TokenSeq& b);

struct GapCandidates {
  double best_score = kLogZero;
  // Every candidate reaching best_score.
  std::vector<TokenSeq> argmax;
};

// Scores every gap of length 0..max_len over the vocabulary minus "</s>":
// sum of token log-probs followed by log p(anchor | prefix + gap), summed
// left to right with saturation.
GapCandidates enumerate_gaps(const Scorer& scorer, const TokenSeq& source, const TokenSeq& prefix,
                             const std::string& anchor, std::size_t max_len);

// Greedy continuation of `prefix` until "</s>" or `budget` tokens.
TokenSeq greedy_continuation(const Scorer& scorer, const TokenSeq& source, const TokenSeq& prefix,
                             std::size_t budget);

// Corpus BLEU in percent from the textbook formula.
double bleu_oracle(const std::vector<TokenSeq>& hyps, const std::vector<TokenSeq>& refs,
                   std::optional<double> epsilon = std::nullopt);

// Greedy-shift TER: number of shifts plus final edit distance.
std::size_t ter_greedy_oracle(const TokenSeq& hyp, const TokenSeq& ref);
// Smallest shifts + edit distance over all shift sequences (breadth-first
// over hypothesis permutations reachable by block moves). Tiny inputs only.
std::size_t ter_optimal_oracle(const TokenSeq& hyp, const TokenSeq& ref, std::size_t max_shifts);

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace imt::testing
