#pragma once

// Randomized property checks shared by the unit tests and the acceptance
// suite. Each returns an empty optional when the case passes and a readable
// description of the failure otherwise.

#include <cstdint>
#include <optional>
#include <string>

namespace imt::testing {

using CaseResult = std::optional<std::string>;

// fill_gap against exhaustive enumeration (vocabulary <= 6, M <= 3).
CaseResult gap_search_case(std::uint64_t seed);

// constrained_decode on a random toy model keeps every feedback segment
// verbatim, in order and without overlap.
CaseResult segment_inclusion_case(std::uint64_t seed);

// constrained_decode against a decoder assembled from the enumeration oracle.
CaseResult skeleton_decode_case(std::uint64_t seed);

// lcs_match length against subsequence enumeration (lengths <= 8).
CaseResult lcs_case(std::uint64_t seed);

// A full simulated session on a random toy model terminates on the
// reference with strictly growing LCS and at most |reference| corrections.
CaseResult session_progress_case(std::uint64_t seed);

// Corpus BLEU and TER against the formula oracles.
CaseResult metric_case(std::uint64_t seed);

}  // namespace imt::testing
