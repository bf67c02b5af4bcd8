#include "imt/decoder.hpp"

#include <algorithm>

#include "imt/errors.hpp"

namespace imt {

std::size_t DecoderConfig::total_len_for(const TokenSeq& source) const {
  const std::size_t cap = max_total_len.value_or(2 * source.size() + 5);
  if (cap < 1) throw InvalidArgument("max_total_len must be >= 1");
  return cap;
}

Hypothesis decode(const TokenSeq& source, const Scorer& scorer, const DecoderConfig& config) {
  const std::size_t cap = config.total_len_for(source);
  const TokenId eos = scorer.vocab().eos();
  Hypothesis hyp;
  while (hyp.size() < cap) {
    const LogDist dist = scorer.next_token_log_dist(source, hyp.tokens);
    const TokenId best = argmax(dist);
    if (best == eos) break;
    hyp.append(scorer.vocab().token(best), dist[best], Provenance::generated);
  }
  return hyp;
}

namespace {

GapFill fill_final_gap(const TokenSeq& source, const TokenSeq& prefix, const Scorer& scorer, std::size_t budget) {
  const TokenId eos = scorer.vocab().eos();
  GapFill fill;
  TokenSeq context = prefix;
  for (std::size_t k = 0; k < budget; ++k) {
    const LogDist dist = scorer.next_token_log_dist(source, context);
    const TokenId best = argmax(dist);
    fill.anchored_logprob = log_mul(fill.anchored_logprob, dist[best]);
    if (best == eos) {
      fill.terminated = true;
      break;
    }
    const std::string& token = scorer.vocab().token(best);
    context.push_back(token);
    fill.tokens.push_back(token);
    fill.token_logprobs.push_back(dist[best]);
  }
  return fill;
}

}  // namespace

GapFill fill_gap(const TokenSeq& source, const TokenSeq& prefix, const GapAnchor& anchor, const Scorer& scorer,
                 const DecoderConfig& config, std::size_t budget) {
  if (anchor.is_end()) return fill_final_gap(source, prefix, scorer, budget);

  const TokenId eos = scorer.vocab().eos();
  const std::size_t limit = std::min(config.max_gap_len, budget);

  TokenSeq context = prefix;
  std::vector<std::string> greedy;
  std::vector<double> greedy_lps;
  double gap_score = 0.0;

  std::size_t best_len = 0;
  double best_score = kLogZero;
  double best_anchor = kLogZero;
  for (std::size_t w = 0;; ++w) {
    const LogDist dist = scorer.next_token_log_dist(source, context);
    const double anchor_lp = scorer.token_log_prob(dist, anchor.token());
    const double score = log_mul(gap_score, anchor_lp);
    if (w == 0 || score > best_score) {
      best_len = w;
      best_score = score;
      best_anchor = anchor_lp;
    }
    if (w == limit) break;
    const TokenId next = argmax(dist, eos);
    gap_score = log_mul(gap_score, dist[next]);
    greedy.push_back(scorer.vocab().token(next));
    greedy_lps.push_back(dist[next]);
    context.push_back(greedy.back());
  }

  GapFill fill;
  fill.tokens = TokenSeq(std::vector<std::string>(greedy.begin(), greedy.begin() + static_cast<std::ptrdiff_t>(best_len)));
  fill.token_logprobs.assign(greedy_lps.begin(), greedy_lps.begin() + static_cast<std::ptrdiff_t>(best_len));
  fill.anchored_logprob = best_score;
  fill.anchor_logprob = best_anchor;
  return fill;
}

Hypothesis constrained_decode(const TokenSeq& source, const Feedback& feedback, const Scorer& scorer,
                              const DecoderConfig& config) {
  if (auto violation = validate_feedback(feedback)) throw InvalidArgument("invalid feedback: " + *violation);
  if (source.empty()) throw InvalidArgument("empty source sentence");
  const std::size_t cap = config.total_len_for(source);
  std::size_t remaining_forced = feedback.forced_length();
  if (remaining_forced > cap) {
    throw InvalidArgument("forced length " + std::to_string(remaining_forced) + " exceeds length cap " +
                          std::to_string(cap));
  }

  Hypothesis hyp;
  const std::size_t n = feedback.n();
  std::optional<double> pending_anchor_lp;

  for (const SkeletonSlot& slot : compose_skeleton(feedback)) {
    if (const auto* gap = std::get_if<GapSlot>(&slot)) {
      if (gap->index == n) {
        const GapFill fill = fill_gap(source, hyp.tokens, GapAnchor::end(), scorer, config, cap - hyp.size());
        for (std::size_t k = 0; k < fill.tokens.size(); ++k) {
          hyp.append(fill.tokens[k], fill.token_logprobs[k], Provenance::generated);
        }
        continue;
      }
      if (gap->index == 0 && !feedback.open_start) continue;
      const std::size_t budget = cap - hyp.size() - remaining_forced;
      const auto& next_word = feedback.segments[gap->index].words[0];
      const GapFill fill = fill_gap(source, hyp.tokens, GapAnchor::before(next_word), scorer, config, budget);
      for (std::size_t k = 0; k < fill.tokens.size(); ++k) {
        hyp.append(fill.tokens[k], fill.token_logprobs[k], Provenance::generated);
      }
      pending_anchor_lp = fill.anchor_logprob;
      continue;
    }

    const auto& segment = std::get<ForcedSlot>(slot).segment;
    for (const auto& word : segment.words) {
      double lp;
      if (pending_anchor_lp) {
        lp = *pending_anchor_lp;
        pending_anchor_lp.reset();
      } else {
        lp = scorer.token_log_prob(scorer.next_token_log_dist(source, hyp.tokens), word);
      }
      hyp.append(word, lp, Provenance::forced);
      --remaining_forced;
    }
  }
  return hyp;
}

}  // namespace imt
