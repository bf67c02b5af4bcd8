#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "imt/core.hpp"
#include "imt/scorer.hpp"

namespace imt {

inline constexpr std::size_t kDefaultMaxGap = 5;

struct DecoderConfig {
  // M: longest non-validated segment tried between two forced segments.
  std::size_t max_gap_len = kDefaultMaxGap;
  // L: hard cap on hypothesis length. Unset means 2 * |source| + 5.
  std::optional<std::size_t> max_total_len;

  std::size_t total_len_for(const TokenSeq& source) const;
};

// What follows a gap: the first word of the next forced segment, or the end
// of the sentence.
class GapAnchor {
 public:
  static GapAnchor end() { return GapAnchor(std::nullopt); }
  static GapAnchor before(std::string token) { return GapAnchor(std::move(token)); }

  bool is_end() const noexcept { return !token_; }
  const std::string& token() const { return *token_; }

 private:
  explicit GapAnchor(std::optional<std::string> token) : token_(std::move(token)) {}
  std::optional<std::string> token_;
};

struct GapFill {
  TokenSeq tokens;
  std::vector<double> token_logprobs;
  // Sum of gap token log-probs plus the anchor term: log p(anchor | prefix+gap)
  // for inner gaps, log p(</s> | ...) for a final gap that terminated.
  double anchored_logprob = 0.0;
  // log p(anchor | prefix+gap); 0 for the final gap.
  double anchor_logprob = 0.0;
  // Final gap only: generation stopped on "</s>" rather than the budget.
  bool terminated = false;
};

// Greedy decoding: per-step argmax (lowest id on ties) until "</s>" or the
// length cap. "</s>" is not part of the returned tokens.
Hypothesis decode(const TokenSeq& source, const Scorer& scorer, const DecoderConfig& config);

// Fills one gap after `prefix`.
//
// Inner gap: tries every length W in 0..min(M, budget), extending the prefix
// greedily ("</s>" excluded), and keeps the W maximizing
// sum(gap log-probs) + log p(anchor | prefix + gap). Ties keep the shorter gap.
//
// Final gap (anchor = end): greedy generation until "</s>" or `budget` tokens.
GapFill fill_gap(const TokenSeq& source, const TokenSeq& prefix, const GapAnchor& anchor, const Scorer& scorer,
                 const DecoderConfig& config, std::size_t budget);

// Produces gap_0 f_1 gap_1 ... f_N gap_N. Forced words are copied verbatim
// and carry their unnormalized model log-probability. gap_0 stays empty
// unless feedback.open_start is set. Throws InvalidArgument for malformed
// feedback or when the forced words alone exceed the length cap.
Hypothesis constrained_decode(const TokenSeq& source, const Feedback& feedback, const Scorer& scorer,
                              const DecoderConfig& config);

}  // namespace imt
