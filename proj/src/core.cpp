#include "imt/core.hpp"

#include <algorithm>

#include "imt/errors.hpp"

namespace imt {

namespace {

bool is_ascii_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

bool is_valid_token(std::string_view token) noexcept {
  return !token.empty() && std::none_of(token.begin(), token.end(), is_ascii_space);
}

std::size_t utf8_length(std::string_view text) noexcept {
  // Count every byte that is not a continuation byte (10xxxxxx).
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0U) != 0x80U;
  }));
}

TokenSeq::TokenSeq(std::vector<std::string> tokens, Side side) : tokens_(std::move(tokens)), side_(side) {
  for (const auto& t : tokens_) {
    if (!is_valid_token(t)) throw InvalidArgument("invalid token '" + t + "'");
  }
}

TokenSeq TokenSeq::from_text(std::string_view text, Side side) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_ascii_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  TokenSeq seq;
  seq.tokens_ = std::move(out);
  seq.side_ = side;
  return seq;
}

void TokenSeq::push_back(std::string token) {
  if (!is_valid_token(token)) throw InvalidArgument("invalid token '" + token + "'");
  tokens_.push_back(std::move(token));
}

void TokenSeq::append(const TokenSeq& other) {
  tokens_.insert(tokens_.end(), other.tokens_.begin(), other.tokens_.end());
}

TokenSeq TokenSeq::slice(std::size_t pos, std::size_t count) const {
  TokenSeq out;
  out.side_ = side_;
  if (pos >= tokens_.size()) return out;
  count = std::min(count, tokens_.size() - pos);
  out.tokens_.assign(tokens_.begin() + static_cast<std::ptrdiff_t>(pos),
                     tokens_.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return out;
}

bool TokenSeq::contains(std::string_view token) const {
  return std::find(tokens_.begin(), tokens_.end(), token) != tokens_.end();
}

std::string TokenSeq::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens_[i];
  }
  return out;
}

std::size_t TokenSeq::char_count() const {
  std::size_t n = tokens_.empty() ? 0 : tokens_.size() - 1;
  for (const auto& t : tokens_) n += utf8_length(t);
  return n;
}

std::size_t Feedback::forced_length() const noexcept {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.words.size();
  return n;
}

bool Feedback::has_correction() const noexcept {
  return std::any_of(segments.begin(), segments.end(),
                     [](const ValidatedSegment& s) { return s.kind == SegmentKind::correction; });
}

std::optional<std::string> validate_feedback(const Feedback& feedback) {
  std::size_t corrections = 0;
  std::optional<RefSpan> previous_span;
  for (std::size_t i = 0; i < feedback.segments.size(); ++i) {
    const auto& seg = feedback.segments[i];
    const std::string where = " (segment " + std::to_string(i) + ")";
    if (seg.words.empty()) return "empty segment" + where;
    for (const auto& w : seg.words) {
      if (!is_valid_token(w)) return "invalid token" + where;
      if (w == kEos) return "end marker inside segment" + where;
    }
    if (seg.kind == SegmentKind::correction) {
      if (seg.words.size() != 1) return "correction length must be 1" + where;
      if (++corrections > 1) return "multiple corrections" + where;
    }
    if (seg.ref_span) {
      const RefSpan& span = *seg.ref_span;
      if (span.end < span.start || span.length() != seg.words.size()) {
        return "span length does not match words" + where;
      }
      if (previous_span && span.start <= previous_span->end) return "overlap" + where;
      previous_span = span;
    }
  }
  return std::nullopt;
}

std::vector<SkeletonSlot> compose_skeleton(const Feedback& feedback) {
  std::vector<SkeletonSlot> slots;
  slots.reserve(2 * feedback.segments.size() + 1);
  slots.emplace_back(GapSlot{0});
  for (std::size_t i = 0; i < feedback.segments.size(); ++i) {
    slots.emplace_back(ForcedSlot{feedback.segments[i]});
    slots.emplace_back(GapSlot{i + 1});
  }
  return slots;
}

void Hypothesis::append(std::string token, double logprob, Provenance origin) {
  tokens.push_back(std::move(token));
  token_logprobs.push_back(logprob);
  provenance.push_back(origin);
}

std::size_t Hypothesis::forced_count() const noexcept {
  return static_cast<std::size_t>(std::count(provenance.begin(), provenance.end(), Provenance::forced));
}

bool Hypothesis::well_formed() const noexcept {
  return token_logprobs.size() == tokens.size() && provenance.size() == tokens.size() &&
         std::all_of(token_logprobs.begin(), token_logprobs.end(), [](double lp) { return lp <= 0.0; });
}

}  // namespace imt
