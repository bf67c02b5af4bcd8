#include "imt/toy_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>

#include "imt/errors.hpp"

namespace imt {

namespace {

constexpr double kRowTolerance = 1e-6;
// Rows already this close to 1 are left untouched so that save/load
// reproduces scores bit for bit.
constexpr double kRenormalizeThreshold = 1e-12;

double row_sum(const std::map<std::string, double>& row) {
  double s = 0.0;
  for (const auto& [_, p] : row) s += p;
  return s;
}

// Empty optional on success; otherwise a "row sum" message.
std::optional<std::string> normalize_row(std::map<std::string, double>& row) {
  for (const auto& [tok, p] : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) return "negative or non-finite probability for '" + tok + "'";
  }
  const double s = row_sum(row);
  if (std::abs(s - 1.0) > kRowTolerance) return "row sum " + std::to_string(s) + " != 1";
  if (std::abs(s - 1.0) > kRenormalizeThreshold) {
    for (auto& [_, p] : row) p /= s;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check_params(double lambda, double alpha) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0,1]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be > 0");
}

}  // namespace

ToyModel::ToyModel(ToyModelTables tables) : tables_(std::move(tables)) {
  check_params(tables_.lambda, tables_.alpha);

  std::set<std::string> targets;
  auto add_target = [&](const std::string& tok) {
    if (!is_valid_token(tok)) throw InvalidArgument("invalid token '" + tok + "'");
    if (tok == kBos) throw InvalidArgument("<s> cannot be a predicted token");
    if (tok != kEos && tok != kUnk) targets.insert(tok);
  };

  for (auto& [src, row] : tables_.lex) {
    if (!is_valid_token(src)) throw InvalidArgument("invalid source token '" + src + "'");
    if (auto err = normalize_row(row)) throw InvalidArgument("lex '" + src + "': " + *err);
    for (const auto& [tgt, _] : row) add_target(tgt);
    if (src != kUnk) source_vocab_.push_back(src);
  }
  for (auto& [prev, row] : tables_.bigram) {
    if (prev == kEos) throw InvalidArgument("</s> cannot be a bigram context");
    if (prev != kBos) add_target(prev);
    if (auto err = normalize_row(row)) throw InvalidArgument("bigram '" + prev + "': " + *err);
    for (const auto& [next, _] : row) add_target(next);
  }

  target_vocab_.assign(targets.begin(), targets.end());
  std::vector<std::string> all{std::string(kEos), std::string(kUnk)};
  all.insert(all.end(), target_vocab_.begin(), target_vocab_.end());
  vocab_ = Vocabulary(std::move(all));

  auto build = [this](const std::map<std::string, double>& row) {
    Row r;
    for (const auto& [tok, p] : row) r.entries.emplace_back(*vocab_.find(tok), p);
    std::sort(r.entries.begin(), r.entries.end());
    for (const auto& [_, p] : r.entries) r.total += p;
    return r;
  };
  for (const auto& [src, row] : tables_.lex) lex_rows_.emplace(src, build(row));
  for (const auto& [prev, row] : tables_.bigram) bigram_rows_.emplace(prev, build(row));
}

LogDist ToyModel::compute_log_dist(const TokenSeq& source, const TokenSeq& prefix) const {
  const std::size_t v = vocab_.size();
  const double uniform = 1.0 / static_cast<double>(v);

  std::vector<double> lexmix(v, 0.0);
  for (const auto& x : source) {
    auto it = lex_rows_.find(x);
    if (it == lex_rows_.end()) it = lex_rows_.find(std::string(kUnk));
    if (it == lex_rows_.end()) {
      for (auto& p : lexmix) p += uniform;
    } else {
      for (const auto& [id, p] : it->second.entries) lexmix[id] += p;
    }
  }
  const double lex_weight = tables_.lambda / static_cast<double>(source.size());

  const std::string context = prefix.empty() ? std::string(kBos) : prefix.back();
  const auto bit = bigram_rows_.find(context);
  const double row_total = bit == bigram_rows_.end() ? 0.0 : bit->second.total;
  const double denom = row_total + tables_.alpha * static_cast<double>(v);
  std::vector<double> counts(v, 0.0);
  if (bit != bigram_rows_.end()) {
    for (const auto& [id, p] : bit->second.entries) counts[id] = p;
  }

  LogDist out(v);
  for (TokenId id = 0; id < v; ++id) {
    const double p = lex_weight * lexmix[id] + (1.0 - tables_.lambda) * (counts[id] + tables_.alpha) / denom;
    out[id] = safe_log(p);
  }
  return out;
}

ToyModel parse_toy_model(std::istream& in) {
  enum class Section { none, params, lex, bigram };
  Section section = Section::none;
  ToyModelTables tables;
  std::map<std::string, std::size_t> first_line;  // row key -> line, for error reporting
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body.front() == '[') {
      if (body == "[params]") section = Section::params;
      else if (body == "[lex]") section = Section::lex;
      else if (body == "[bigram]") section = Section::bigram;
      else throw ParseError("unknown section " + std::string(body), lineno);
      continue;
    }
    switch (section) {
      case Section::none:
        throw ParseError("entry outside of a section", lineno);
      case Section::params: {
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value", lineno);
        const auto key = trim(body.substr(0, eq));
        const auto value = parse_double(trim(body.substr(eq + 1)));
        if (!value) throw ParseError("bad number for " + std::string(key), lineno);
        if (key == "lambda") tables.lambda = *value;
        else if (key == "alpha") tables.alpha = *value;
        else throw ParseError("unknown parameter " + std::string(key), lineno);
        break;
      }
      case Section::lex:
      case Section::bigram: {
        std::istringstream fields{std::string(body)};
        std::string ctx, tok, prob, extra;
        if (!(fields >> ctx >> tok >> prob) || (fields >> extra)) {
          throw ParseError("expected three fields", lineno);
        }
        const auto p = parse_double(prob);
        if (!p) throw ParseError("bad probability '" + prob + "'", lineno);
        const bool lex = section == Section::lex;
        auto& table = lex ? tables.lex : tables.bigram;
        if (!table[ctx].emplace(tok, *p).second) {
          throw ParseError("duplicate entry " + ctx + " " + tok, lineno);
        }
        first_line.emplace((lex ? "lex:" : "bigram:") + ctx, lineno);
        break;
      }
    }
  }

  try {
    check_params(tables.lambda, tables.alpha);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
  // Report row-sum violations against the row's first line.
  for (const auto& [prefix, table] : {std::pair{"lex:", &tables.lex}, std::pair{"bigram:", &tables.bigram}}) {
    for (const auto& [ctx, row] : *table) {
      auto copy = row;
      if (auto err = normalize_row(copy)) {
        throw ParseError(std::string(prefix) + ctx + " " + *err, first_line[std::string(prefix) + ctx]);
      }
    }
  }
  try {
    return ToyModel(std::move(tables));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
}

ToyModel load_toy_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  return parse_toy_model(in);
}

std::string format_toy_model(const ToyModel& model) {
  const auto& t = model.tables();
  std::ostringstream out;
  out << "[params]\nlambda=" << format_double(t.lambda) << "\nalpha=" << format_double(t.alpha) << "\n\n[lex]\n";
  for (const auto& [src, row] : t.lex) {
    for (const auto& [tgt, p] : row) out << src << ' ' << tgt << ' ' << format_double(p) << '\n';
  }
  out << "\n[bigram]\n";
  for (const auto& [prev, row] : t.bigram) {
    for (const auto& [next, p] : row) out << prev << ' ' << next << ' ' << format_double(p) << '\n';
  }
  return out.str();
}

void save_toy_model(const ToyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  out << format_toy_model(model);
}

}  // namespace imt
