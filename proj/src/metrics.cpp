#include "imt/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "imt/errors.hpp"

namespace imt {

namespace {

constexpr std::size_t kMaxOrder = 4;

using NGramCounts = std::map<std::vector<std::string>, std::size_t>;

NGramCounts count_ngrams(const TokenSeq& seq, std::size_t order) {
  NGramCounts counts;
  if (seq.size() < order) return counts;
  for (std::size_t i = 0; i + order <= seq.size(); ++i) {
    ++counts[std::vector<std::string>(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                      seq.begin() + static_cast<std::ptrdiff_t>(i + order))];
  }
  return counts;
}

void check_corpus(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references) {
  if (hypotheses.empty()) throw InvalidArgument("empty corpus");
  if (hypotheses.size() != references.size()) {
    throw InvalidArgument("hypothesis count " + std::to_string(hypotheses.size()) + " != reference count " +
                          std::to_string(references.size()));
  }
}

// Whether `block` occurs contiguously in `ref`.
bool occurs_in(std::span<const std::string> block, std::span<const std::string> ref) {
  return std::search(ref.begin(), ref.end(), block.begin(), block.end()) != ref.end();
}

}  // namespace

double bleu(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references, const BleuOptions& options) {
  check_corpus(hypotheses, references);
  std::array<std::size_t, kMaxOrder> matches{};
  std::array<std::size_t, kMaxOrder> totals{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    hyp_len += hypotheses[s].size();
    ref_len += references[s].size();
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto hyp_counts = count_ngrams(hypotheses[s], n);
      const auto ref_counts = count_ngrams(references[s], n);
      for (const auto& [gram, count] : hyp_counts) {
        totals[n - 1] += count;
        if (auto it = ref_counts.find(gram); it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (hyp_len == 0) return 0.0;

  double log_precision_sum = 0.0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    if (totals[n] == 0) return 0.0;
    double hits = static_cast<double>(matches[n]);
    if (matches[n] == 0) {
      if (!options.smooth_epsilon) return 0.0;
      hits = *options.smooth_epsilon;
    }
    log_precision_sum += std::log(hits / static_cast<double>(totals[n]));
  }
  const double brevity =
      hyp_len < ref_len ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)) : 1.0;
  return 100.0 * brevity * std::exp(log_precision_sum / static_cast<double>(kMaxOrder));
}

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

TerResult ter_stats(const TokenSeq& hypothesis, const TokenSeq& reference) {
  if (reference.empty()) throw InvalidArgument("TER needs a non-empty reference");
  const std::vector<std::string>& ref = reference.tokens();
  std::vector<std::string> hyp = hypothesis.tokens();

  TerResult result;
  result.ref_len = ref.size();
  std::size_t distance = edit_distance(hyp, ref);
  std::vector<std::string> candidate;
  candidate.reserve(hyp.size());

  while (distance > 0) {
    std::size_t best_distance = distance;
    std::vector<std::string> best;
    const std::size_t n = hyp.size();
    for (std::size_t start = 0; start < n; ++start) {
      for (std::size_t len = 1; len <= std::min(kMaxShiftBlock, n - start); ++len) {
        const std::span<const std::string> block(hyp.data() + start, len);
        // Longer blocks from this start extend this one, so stop at the first miss.
        if (!occurs_in(block, ref)) break;
        for (std::size_t dest = 0; dest + len <= n; ++dest) {
          if (dest == start) continue;
          candidate.assign(hyp.begin(), hyp.begin() + static_cast<std::ptrdiff_t>(start));
          candidate.insert(candidate.end(), hyp.begin() + static_cast<std::ptrdiff_t>(start + len), hyp.end());
          candidate.insert(candidate.begin() + static_cast<std::ptrdiff_t>(dest), block.begin(), block.end());
          const std::size_t d = edit_distance(candidate, ref);
          if (d < best_distance) {
            best_distance = d;
            best = candidate;
          }
        }
      }
    }
    if (best_distance == distance) break;
    hyp = std::move(best);
    distance = best_distance;
    ++result.shifts;
  }
  result.edits = distance;
  return result;
}

double ter(const TokenSeq& hypothesis, const TokenSeq& reference) { return ter_stats(hypothesis, reference).score(); }

double corpus_ter(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references) {
  check_corpus(hypotheses, references);
  std::size_t edits = 0;
  std::size_t words = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const TerResult r = ter_stats(hypotheses[s], references[s]);
    edits += r.shifts + r.edits;
    words += r.ref_len;
  }
  return 100.0 * static_cast<double>(edits) / static_cast<double>(words);
}

EffortRatios effort_metrics(std::span<const SessionLog> logs) {
  if (logs.empty()) throw InvalidArgument("no session logs");
  std::int64_t ws = 0, ks = 0, ma = 0;
  std::size_t words = 0, chars = 0;
  for (const SessionLog& log : logs) {
    if (log.final_hypothesis.tokens() != log.reference.tokens()) {
      throw InvalidArgument("session did not finish on its reference");
    }
    ws += log.totals.word_strokes;
    ks += log.totals.key_strokes;
    ma += log.totals.mouse_actions;
    words += log.final_hypothesis.size();
    chars += log.final_hypothesis.char_count();
  }
  EffortRatios r;
  r.wsr = 100.0 * static_cast<double>(ws) / static_cast<double>(words);
  r.ksr = 100.0 * static_cast<double>(ks) / static_cast<double>(chars);
  r.mar = 100.0 * static_cast<double>(ma) / static_cast<double>(chars);
  return r;
}

CorpusScores score_sessions(std::span<const SessionLog> logs, const BleuOptions& options) {
  std::vector<TokenSeq> initial;
  std::vector<TokenSeq> references;
  initial.reserve(logs.size());
  references.reserve(logs.size());
  for (const SessionLog& log : logs) {
    initial.push_back(log.initial_hypothesis());
    references.push_back(log.reference);
  }
  CorpusScores scores;
  scores.bleu = bleu(initial, references, options);
  scores.ter = corpus_ter(initial, references);
  const EffortRatios effort = effort_metrics(logs);
  scores.wsr = effort.wsr;
  scores.ksr = effort.ksr;
  scores.mar = effort.mar;
  scores.sentences = logs.size();
  return scores;
}

}  // namespace imt
