#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "imt/core.hpp"
#include "imt/metrics.hpp"
#include "imt/simulator.hpp"

namespace imt {

struct SentencePair {
  TokenSeq source;
  TokenSeq reference;
  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct ParallelCorpus {
  std::string name;
  std::vector<SentencePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
};

struct LoadOptions {
  bool lowercase = false;
};

// Text is NFC-normalized on load so character counts do not depend on how a
// file happened to encode accents. Throws Error on invalid UTF-8.
std::string normalize_nfc(std::string_view utf8);
std::string lowercase_utf8(std::string_view utf8);

// One sentence per line. Throws ParseError on an empty line.
std::vector<TokenSeq> load_sentences(const std::filesystem::path& path, Side side, const LoadOptions& options = {});

// Two line-aligned files. Throws ParseError("line count A != B") on mismatch.
ParallelCorpus load_parallel(const std::filesystem::path& source_path, const std::filesystem::path& target_path,
                             const LoadOptions& options = {});
// Two tab-separated columns, source first.
ParallelCorpus load_parallel_tsv(const std::filesystem::path& tsv_path, const LoadOptions& options = {});

// Session logs as JSON Lines, one session per line.
nlohmann::ordered_json session_to_json(const SessionLog& log);
SessionLog session_from_json(const nlohmann::ordered_json& j);
void write_session_logs(std::span<const SessionLog> logs, const std::filesystem::path& path);
void append_session_log(const SessionLog& log, const std::filesystem::path& path);
std::vector<SessionLog> read_session_logs(const std::filesystem::path& path);

// Report formats. The CSV has a header line and a single row.
nlohmann::ordered_json report_to_json(const CorpusScores& scores);
std::string report_json(const CorpusScores& scores);
std::string report_csv(const CorpusScores& scores);

}  // namespace imt
