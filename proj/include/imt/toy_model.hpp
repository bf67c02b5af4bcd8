#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "imt/scorer.hpp"

namespace imt {

inline constexpr double kDefaultLambda = 0.7;
inline constexpr double kDefaultAlpha = 0.1;

// Raw probability tables of the toy model. Rows map a context token to
// next-token probabilities and must each sum to 1.
struct ToyModelTables {
  double lambda = kDefaultLambda;
  double alpha = kDefaultAlpha;
  // source token -> target token -> p. "<unk>" rows serve unknown source words.
  std::map<std::string, std::map<std::string, double>> lex;
  // previous target token (or "<s>") -> next target token (or "</s>") -> p.
  std::map<std::string, std::map<std::string, double>> bigram;
};

// Lexical translation table mixed with an add-alpha smoothed bigram LM:
//
//   p(y | prefix, src) = lambda * (1/J) sum_j lex(y | x_j)
//                      + (1 - lambda) * (bigram(u, y) + alpha) / (sum_y' bigram(u, y') + alpha |V|)
//
// where u is the last prefix token (or "<s>") and V is the full output
// vocabulary, "</s>" and "<unk>" included. A source word without a lex row
// falls back to the "<unk>" row, and to a uniform row when that is absent.
class ToyModel final : public Scorer {
 public:
  // Rows within 1e-6 of summing to 1 are renormalized; anything further off
  // throws InvalidArgument ("row sum ...").
  explicit ToyModel(ToyModelTables tables);

  const Vocabulary& vocab() const override { return vocab_; }
  // Entry tokens only (no reserved tokens), sorted.
  const std::vector<std::string>& source_vocab() const noexcept { return source_vocab_; }
  const std::vector<std::string>& target_vocab() const noexcept { return target_vocab_; }
  const ToyModelTables& tables() const noexcept { return tables_; }

 protected:
  LogDist compute_log_dist(const TokenSeq& source, const TokenSeq& prefix) const override;

 private:
  struct Row {
    std::vector<std::pair<TokenId, double>> entries;  // sorted by id
    double total = 0.0;
  };

  ToyModelTables tables_;
  Vocabulary vocab_;
  std::vector<std::string> source_vocab_;
  std::vector<std::string> target_vocab_;
  std::unordered_map<std::string, Row> lex_rows_;
  std::unordered_map<std::string, Row> bigram_rows_;
};

// Text format:
//
//   [params]            lambda=<float>, alpha=<float> (defaults 0.7 / 0.1)
//   [lex]               src_token tgt_token prob
//   [bigram]            prev_token next_token prob   (prev may be <s>, next </s>)
//
// Lines starting with '#' are comments. Errors are ParseError with the line.
ToyModel parse_toy_model(std::istream& in);
ToyModel load_toy_model(const std::filesystem::path& path);

// Writes tables in the same format; values use shortest round-trip notation.
std::string format_toy_model(const ToyModel& model);
void save_toy_model(const ToyModel& model, const std::filesystem::path& path);

}  // namespace imt
