#pragma once

// Value types shared across the workbench: token sequences, user feedback,
// hypotheses and effort tallies.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace imt {

// Reserved tokens. "<s>" is only ever a language-model context, never a
// surface token; "</s>" terminates hypotheses; "<unk>" absorbs unknown words.
inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

enum class Side { source, target };

// True when `token` is non-empty and contains no whitespace.
bool is_valid_token(std::string_view token) noexcept;

// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text) noexcept;

class TokenSeq {
 public:
  TokenSeq() = default;
  // Throws InvalidArgument when a token is empty or holds whitespace.
  explicit TokenSeq(std::vector<std::string> tokens, Side side = Side::target);

  // Whitespace tokenization: runs of ASCII whitespace separate tokens.
  static TokenSeq from_text(std::string_view text, Side side = Side::target);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  Side side() const noexcept { return side_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  const std::string& back() const { return tokens_.back(); }
  auto begin() const noexcept { return tokens_.begin(); }
  auto end() const noexcept { return tokens_.end(); }

  void push_back(std::string token);
  void append(const TokenSeq& other);
  TokenSeq slice(std::size_t pos, std::size_t count) const;
  bool contains(std::string_view token) const;

  // Single-space join.
  std::string text() const;
  // Code points of all tokens plus one separating space between tokens.
  std::size_t char_count() const;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;

 private:
  std::vector<std::string> tokens_;
  Side side_ = Side::target;
};

enum class SegmentKind { validated, correction };

// 0-based inclusive span into the reference.
struct RefSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t length() const noexcept { return end - start + 1; }
  friend bool operator==(const RefSpan&, const RefSpan&) = default;
};

struct ValidatedSegment {
  TokenSeq words;
  SegmentKind kind = SegmentKind::validated;
  std::optional<RefSpan> ref_span;

  friend bool operator==(const ValidatedSegment&, const ValidatedSegment&) = default;
};

// Ordered, non-overlapping segments the user has vouched for. The
// correction, if any, is one of them.
//
// open_start lets the decoder generate words ahead of the first segment.
// When false the hypothesis starts with the first segment.
struct Feedback {
  std::vector<ValidatedSegment> segments;
  bool open_start = false;

  std::size_t n() const noexcept { return segments.size(); }
  std::size_t forced_length() const noexcept;
  bool has_correction() const noexcept;

  friend bool operator==(const Feedback&, const Feedback&) = default;
};

// Returns the first broken invariant, or nullopt when the feedback is
// well formed. Messages start with a stable keyword: "empty segment",
// "invalid token", "end marker", "correction length", "multiple corrections",
// "span length", "overlap".
std::optional<std::string> validate_feedback(const Feedback& feedback);

struct GapSlot {
  std::size_t index = 0;
  friend bool operator==(const GapSlot&, const GapSlot&) = default;
};

struct ForcedSlot {
  ValidatedSegment segment;
  friend bool operator==(const ForcedSlot&, const ForcedSlot&) = default;
};

using SkeletonSlot = std::variant<GapSlot, ForcedSlot>;

// [gap_0, f_1, gap_1, ..., f_N, gap_N].
std::vector<SkeletonSlot> compose_skeleton(const Feedback& feedback);

enum class Provenance : char { forced = 'f', generated = 'g' };

struct Hypothesis {
  TokenSeq tokens;
  std::vector<double> token_logprobs;
  std::vector<Provenance> provenance;

  void append(std::string token, double logprob, Provenance origin);
  std::size_t size() const noexcept { return tokens.size(); }
  std::size_t forced_count() const noexcept;
  // Parallel arrays agree in length and every log-probability is <= 0.
  bool well_formed() const noexcept;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct EffortTally {
  std::int64_t word_strokes = 0;
  std::int64_t key_strokes = 0;
  std::int64_t mouse_actions = 0;

  EffortTally& operator+=(const EffortTally& other) noexcept {
    word_strokes += other.word_strokes;
    key_strokes += other.key_strokes;
    mouse_actions += other.mouse_actions;
    return *this;
  }
  friend EffortTally operator+(EffortTally a, const EffortTally& b) noexcept { return a += b; }
  friend bool operator==(const EffortTally&, const EffortTally&) = default;
};

}  // namespace imt
