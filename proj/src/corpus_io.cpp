#include "imt/corpus_io.hpp"

#include <fstream>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include "imt/errors.hpp"

namespace imt {

namespace {

icu::UnicodeString decode_utf8(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  int32_t length = 0;
  int32_t substitutions = 0;
  const auto src_len = static_cast<int32_t>(utf8.size());
  u_strFromUTF8WithSub(nullptr, 0, &length, utf8.data(), src_len, 0xFFFD, &substitutions, &status);
  if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) throw Error("cannot decode UTF-8 text");
  if (substitutions > 0) throw Error("invalid UTF-8 input");
  return icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), src_len));
}

std::string encode_utf8(const icu::UnicodeString& text) {
  std::string out;
  text.toUTF8String(out);
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

// Lines without their terminators. A UTF-8 byte-order mark is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lines.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    lines.push_back(std::move(line));
  }
  return lines;
}

TokenSeq tokenize_line(std::string_view line, Side side, const LoadOptions& options, std::size_t lineno) {
  std::string text;
  try {
    text = normalize_nfc(line);
  } catch (const Error& e) {
    throw ParseError(e.what(), lineno);
  }
  if (options.lowercase) text = lowercase_utf8(text);
  TokenSeq seq = TokenSeq::from_text(text, side);
  if (seq.empty()) throw ParseError("empty line", lineno);
  return seq;
}

template <typename Json>
std::vector<std::string> string_array(const Json& j, const char* key) {
  return j.at(key).template get<std::vector<std::string>>();
}

}  // namespace

std::string normalize_nfc(std::string_view utf8) {
  const icu::UnicodeString text = decode_utf8(utf8);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("NFC normalizer unavailable");
  const icu::UnicodeString normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return encode_utf8(normalized);
}

std::string lowercase_utf8(std::string_view utf8) {
  icu::UnicodeString text = decode_utf8(utf8);
  text.toLower(icu::Locale::getRoot());
  return encode_utf8(text);
}

std::vector<TokenSeq> load_sentences(const std::filesystem::path& path, Side side, const LoadOptions& options) {
  const auto lines = read_lines(path);
  std::vector<TokenSeq> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) out.push_back(tokenize_line(lines[i], side, options, i + 1));
  return out;
}

ParallelCorpus load_parallel(const std::filesystem::path& source_path, const std::filesystem::path& target_path,
                             const LoadOptions& options) {
  const auto src = read_lines(source_path);
  const auto tgt = read_lines(target_path);
  if (src.size() != tgt.size()) {
    throw ParseError("line count " + std::to_string(src.size()) + " != " + std::to_string(tgt.size()), 0);
  }
  ParallelCorpus corpus;
  corpus.name = source_path.stem().string();
  for (std::size_t i = 0; i < src.size(); ++i) {
    corpus.pairs.push_back(
        {tokenize_line(src[i], Side::source, options, i + 1), tokenize_line(tgt[i], Side::target, options, i + 1)});
  }
  return corpus;
}

ParallelCorpus load_parallel_tsv(const std::filesystem::path& tsv_path, const LoadOptions& options) {
  const auto lines = read_lines(tsv_path);
  ParallelCorpus corpus;
  corpus.name = tsv_path.stem().string();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("missing field at line " + std::to_string(i + 1), i + 1);
    if (line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("extra field at line " + std::to_string(i + 1), i + 1);
    }
    corpus.pairs.push_back({tokenize_line(std::string_view(line).substr(0, tab), Side::source, options, i + 1),
                            tokenize_line(std::string_view(line).substr(tab + 1), Side::target, options, i + 1)});
  }
  return corpus;
}

nlohmann::ordered_json session_to_json(const SessionLog& log) {
  using nlohmann::ordered_json;
  ordered_json iterations = ordered_json::array();
  for (const IterationRecord& it : log.iterations) {
    ordered_json feedback = ordered_json::array();
    for (const ValidatedSegment& seg : it.feedback.segments) {
      ordered_json s = {{"words", seg.words.tokens()},
                        {"kind", seg.kind == SegmentKind::correction ? "correction" : "validated"}};
      if (seg.ref_span) s["ref_span"] = {seg.ref_span->start, seg.ref_span->end};
      feedback.push_back(std::move(s));
    }
    std::string provenance;
    for (Provenance p : it.hypothesis_before.provenance) provenance.push_back(static_cast<char>(p));
    ordered_json record = {{"hypothesis", it.hypothesis_before.tokens.tokens()},
                           {"logprobs", it.hypothesis_before.token_logprobs},
                           {"provenance", provenance},
                           {"feedback", std::move(feedback)}};
    if (it.feedback.open_start) record["open_start"] = true;
    record["ma"] = it.mouse_actions;
    record["ks"] = it.key_strokes;
    record["ws"] = it.word_strokes;
    iterations.push_back(std::move(record));
  }
  return {{"source", log.source.tokens()},
          {"reference", log.reference.tokens()},
          {"iterations", std::move(iterations)},
          {"final", log.final_hypothesis.tokens()},
          {"totals",
           {{"ws", log.totals.word_strokes}, {"ks", log.totals.key_strokes}, {"ma", log.totals.mouse_actions}}}};
}

SessionLog session_from_json(const nlohmann::ordered_json& j) {
  SessionLog log;
  log.source = TokenSeq(string_array(j, "source"), Side::source);
  log.reference = TokenSeq(string_array(j, "reference"), Side::target);
  for (const auto& it : j.at("iterations")) {
    IterationRecord record;
    record.hypothesis_before.tokens = TokenSeq(string_array(it, "hypothesis"), Side::target);
    record.hypothesis_before.token_logprobs = it.at("logprobs").get<std::vector<double>>();
    for (char c : it.at("provenance").get<std::string>()) {
      if (c != 'f' && c != 'g') throw InvalidArgument("bad provenance code");
      record.hypothesis_before.provenance.push_back(static_cast<Provenance>(c));
    }
    if (!record.hypothesis_before.well_formed()) throw InvalidArgument("inconsistent hypothesis arrays");
    for (const auto& s : it.at("feedback")) {
      ValidatedSegment seg;
      seg.words = TokenSeq(string_array(s, "words"), Side::target);
      const auto kind = s.at("kind").get<std::string>();
      if (kind == "correction") seg.kind = SegmentKind::correction;
      else if (kind != "validated") throw InvalidArgument("unknown segment kind " + kind);
      if (s.contains("ref_span")) {
        const auto span = s.at("ref_span").get<std::vector<std::size_t>>();
        if (span.size() != 2) throw InvalidArgument("ref_span needs two indices");
        seg.ref_span = RefSpan{span[0], span[1]};
      }
      record.feedback.segments.push_back(std::move(seg));
    }
    record.feedback.open_start = it.value("open_start", false);
    record.mouse_actions = it.at("ma").get<std::int64_t>();
    record.key_strokes = it.at("ks").get<std::int64_t>();
    record.word_strokes = it.at("ws").get<std::int64_t>();
    log.iterations.push_back(std::move(record));
  }
  log.final_hypothesis = TokenSeq(string_array(j, "final"), Side::target);
  const auto& totals = j.at("totals");
  log.totals = {totals.at("ws").get<std::int64_t>(), totals.at("ks").get<std::int64_t>(),
                totals.at("ma").get<std::int64_t>()};
  return log;
}

void write_session_logs(std::span<const SessionLog> logs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const SessionLog& log : logs) out << session_to_json(log).dump() << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

void append_session_log(const SessionLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  out << session_to_json(log).dump() << '\n';
}

std::vector<SessionLog> read_session_logs(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<SessionLog> logs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    try {
      logs.push_back(session_from_json(nlohmann::ordered_json::parse(lines[i])));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed session log: ") + e.what(), i + 1);
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("malformed session log: ") + e.what(), i + 1);
    }
  }
  return logs;
}

nlohmann::ordered_json report_to_json(const CorpusScores& scores) {
  return {{"bleu", scores.bleu}, {"ter", scores.ter},         {"wsr", scores.wsr},
          {"ksr", scores.ksr},   {"mar", scores.mar},         {"sentences", scores.sentences}};
}

std::string report_json(const CorpusScores& scores) { return report_to_json(scores).dump(2) + "\n"; }

std::string report_csv(const CorpusScores& scores) {
  // Reuse the JSON number formatting so both reports agree digit for digit.
  const auto j = report_to_json(scores);
  std::string header, row;
  for (const auto& [key, value] : j.items()) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    row += value.dump();
  }
  return header + "\n" + row + "\n";
}

}  // namespace imt
