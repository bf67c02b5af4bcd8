#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "imt/core.hpp"
#include "imt/decoder.hpp"
#include "imt/scorer.hpp"

namespace imt {

// Mouse/keyboard costs charged to the simulated user. The values are fixed
// by the protocol; they are fields only so logs can state what was used.
struct CostModel {
  std::int64_t select_one_word = 1;
  std::int64_t select_multi_word = 2;
  std::int64_t merge_one_word_between = 1;
  std::int64_t merge_multi_word_between = 2;
  std::int64_t merge_zero_words_between = 0;
  std::int64_t correction_move = 1;
  std::int64_t accept_final = 1;

  // Selection cost of a segment of `length` words.
  std::int64_t selection(std::size_t length) const noexcept {
    return length == 1 ? select_one_word : select_multi_word;
  }
  // Cost of dragging over `between` unwanted words to delete them.
  std::int64_t merge(std::size_t between) const noexcept {
    if (between == 0) return merge_zero_words_between;
    return between == 1 ? merge_one_word_between : merge_multi_word_between;
  }
};

struct SimConfig {
  std::size_t max_iterations = 500;
  CostModel costs;
};

struct IterationRecord {
  Hypothesis hypothesis_before;
  Feedback feedback;
  std::int64_t mouse_actions = 0;
  std::int64_t key_strokes = 0;
  std::int64_t word_strokes = 0;

  EffortTally effort() const noexcept { return {word_strokes, key_strokes, mouse_actions}; }
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct SessionLog {
  TokenSeq source;
  TokenSeq reference;
  std::vector<IterationRecord> iterations;
  TokenSeq final_hypothesis;
  EffortTally totals;

  // The first hypothesis the system proposed.
  TokenSeq initial_hypothesis() const;
  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

using IndexPair = std::pair<std::size_t, std::size_t>;  // (hypothesis index, reference index)

// A longest common subsequence as strictly increasing index pairs. The walk
// is deterministic: on equal tokens it matches, otherwise it advances the
// hypothesis side whenever that does not shorten the result.
std::vector<IndexPair> lcs_match(const TokenSeq& hypothesis, const TokenSeq& reference);

// Maximal runs of LCS pairs that are consecutive in both sequences.
struct MatchedRun {
  std::size_t hyp_start = 0;
  std::size_t ref_start = 0;
  std::size_t length = 0;

  std::size_t hyp_end() const noexcept { return hyp_start + length - 1; }
  std::size_t ref_end() const noexcept { return ref_start + length - 1; }
};
std::vector<MatchedRun> matched_runs(const std::vector<IndexPair>& pairs);

struct FeedbackStep {
  Feedback feedback;
  EffortTally cost;
  // Reference indices covered by the feedback, the correction included.
  std::vector<bool> covered;
  // False when every reference word was already present: the user only
  // deletes surplus words and the hypothesis becomes the reference.
  bool has_correction = false;
};

// One round of the simulated user:
//  - validates every LCS run, charging selection only for runs holding a
//    reference index not in `previously_covered`;
//  - merges runs that are adjacent in the reference, paying for the
//    hypothesis words dragged over between them;
//  - types the leftmost uncovered reference word as a one-word correction
//    (one mouse move plus one keystroke per character).
// When nothing is left to correct, surplus words before the first and after
// the last run are deleted at merge prices instead.
// `previously_covered` may be empty (nothing covered yet).
FeedbackStep extract_feedback(const TokenSeq& hypothesis, const TokenSeq& reference,
                              const std::vector<bool>& previously_covered, const CostModel& costs = {});

// Drives decode -> feedback -> constrained_decode until the hypothesis equals
// the reference, then charges the final accept. The length cap is raised to
// |reference| when needed so the reference stays reachable. Throws Error if
// max_iterations is exceeded.
SessionLog run_session(const TokenSeq& source, const TokenSeq& reference, const Scorer& scorer,
                       const DecoderConfig& decoder_config, const SimConfig& sim_config = {});

}  // namespace imt
