#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "imt/core.hpp"

namespace imt {

// log(0). Kept finite so it survives JSON and arithmetic; sums that would
// fall below it saturate here (see log_mul).
inline constexpr double kLogZero = std::numeric_limits<double>::lowest();

// Log-domain product, saturating at kLogZero.
inline double log_mul(double a, double b) noexcept {
  const double s = a + b;
  return s < kLogZero ? kLogZero : s;
}

// log(p) with log(0) mapped to kLogZero.
double safe_log(double p) noexcept;

using TokenId = std::size_t;

// Closed target vocabulary. Index order is the tie-break order used by
// every argmax in the decoder.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws InvalidArgument on duplicates or when "</s>" or "<unk>" is missing.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::optional<TokenId> find(std::string_view token) const;
  TokenId eos() const noexcept { return eos_; }
  TokenId unk() const noexcept { return unk_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  TokenId eos_ = 0;
  TokenId unk_ = 0;
};

// Log-probabilities indexed by TokenId of the scorer's vocabulary.
using LogDist = std::vector<double>;

// Next-token distribution Pr(y_i | y_1^{i-1}, x_1^J). Implementations must be
// deterministic and safe to call concurrently from several threads.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual const Vocabulary& vocab() const = 0;

  // Throws InvalidArgument when source is empty or prefix holds "</s>".
  LogDist next_token_log_dist(const TokenSeq& source, const TokenSeq& prefix) const;

  // Log-probability the scorer gives `token` after `prefix`; kLogZero for
  // tokens outside the vocabulary.
  double token_log_prob(const LogDist& dist, std::string_view token) const;

 protected:
  virtual LogDist compute_log_dist(const TokenSeq& source, const TokenSeq& prefix) const = 0;
};

// Sum of stepwise log-probabilities of `target`, which must end with exactly
// one "</s>". Saturates at kLogZero.
double sequence_log_prob(const Scorer& scorer, const TokenSeq& source, const TokenSeq& target);

// Index of the largest entry; ties go to the lowest index. `skip` is never
// returned unless it is the only entry.
TokenId argmax(const LogDist& dist, std::optional<TokenId> skip = std::nullopt);

}  // namespace imt
