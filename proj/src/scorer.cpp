#include "imt/scorer.hpp"

#include <cmath>

#include "imt/errors.hpp"

namespace imt {

double safe_log(double p) noexcept {
  if (!(p > 0.0)) return kLogZero;
  return std::max(std::log(p), kLogZero);
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (TokenId id = 0; id < tokens_.size(); ++id) {
    if (!is_valid_token(tokens_[id])) throw InvalidArgument("invalid vocabulary token '" + tokens_[id] + "'");
    if (!ids_.emplace(tokens_[id], id).second) {
      throw InvalidArgument("duplicate vocabulary token '" + tokens_[id] + "'");
    }
  }
  auto eos = find(kEos);
  auto unk = find(kUnk);
  if (!eos || !unk) throw InvalidArgument("vocabulary must contain </s> and <unk>");
  if (find(kBos)) throw InvalidArgument("<s> is a context marker and cannot be a vocabulary token");
  eos_ = *eos;
  unk_ = *unk;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

LogDist Scorer::next_token_log_dist(const TokenSeq& source, const TokenSeq& prefix) const {
  if (source.empty()) throw InvalidArgument("empty source sentence");
  if (prefix.contains(kEos)) throw InvalidArgument("prefix contains </s>");
  LogDist dist = compute_log_dist(source, prefix);
  if (dist.size() != vocab().size()) {
    throw ScorerError("scorer returned " + std::to_string(dist.size()) + " entries for a vocabulary of " +
                      std::to_string(vocab().size()));
  }
  return dist;
}

double Scorer::token_log_prob(const LogDist& dist, std::string_view token) const {
  auto id = vocab().find(token);
  if (!id) return kLogZero;
  return dist[*id];
}

double sequence_log_prob(const Scorer& scorer, const TokenSeq& source, const TokenSeq& target) {
  if (target.empty() || target.back() != kEos) throw InvalidArgument("target must end with </s>");
  TokenSeq prefix({}, Side::target);
  double total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] == kEos && i + 1 != target.size()) throw InvalidArgument("misplaced </s> in target");
    const LogDist dist = scorer.next_token_log_dist(source, prefix);
    total = log_mul(total, scorer.token_log_prob(dist, target[i]));
    if (i + 1 < target.size()) prefix.push_back(target[i]);
  }
  return total;
}

TokenId argmax(const LogDist& dist, std::optional<TokenId> skip) {
  std::optional<TokenId> best;
  for (TokenId id = 0; id < dist.size(); ++id) {
    if (skip && id == *skip) continue;
    if (!best || dist[id] > dist[*best]) best = id;
  }
  if (!best) {
    if (dist.empty()) throw InvalidArgument("argmax of an empty distribution");
    return 0;
  }
  return *best;
}

}  // namespace imt
