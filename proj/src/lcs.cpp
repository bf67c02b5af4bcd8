#include "imt/simulator.hpp"

namespace imt {

std::vector<IndexPair> lcs_match(const TokenSeq& hypothesis, const TokenSeq& reference) {
  const std::size_t n = hypothesis.size();
  const std::size_t m = reference.size();
  // suffix[i][j] = LCS length of hypothesis[i:] and reference[j:]
  std::vector<std::size_t> suffix((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return suffix[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = hypothesis[i] == reference[j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  std::vector<IndexPair> pairs;
  pairs.reserve(at(0, 0));
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    if (hypothesis[i] == reference[j]) {
      pairs.emplace_back(i++, j++);
    } else if (at(i + 1, j) >= at(i, j + 1)) {
      ++i;
    } else {
      ++j;
    }
  }
  return pairs;
}

std::vector<MatchedRun> matched_runs(const std::vector<IndexPair>& pairs) {
  std::vector<MatchedRun> runs;
  for (const auto& [h, r] : pairs) {
    if (!runs.empty() && runs.back().hyp_end() + 1 == h && runs.back().ref_end() + 1 == r) {
      ++runs.back().length;
    } else {
      runs.push_back({h, r, 1});
    }
  }
  return runs;
}

}  // namespace imt
