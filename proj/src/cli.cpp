#include "imt/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "imt/errors.hpp"
#include "imt/http_scorer.hpp"
#include "imt/metrics.hpp"
#include "imt/session_service.hpp"

namespace imt {

std::vector<SessionLog> simulate_corpus(const ParallelCorpus& corpus, const Scorer& scorer,
                                        const DecoderConfig& decoder_config, const SimConfig& sim_config,
                                        std::size_t threads) {
  const std::size_t n = corpus.size();
  std::vector<std::optional<SessionLog>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_session(corpus.pairs[i].source, corpus.pairs[i].reference, scorer, decoder_config, sim_config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<SessionLog> logs;
  logs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    logs.push_back(std::move(*results[i]));
  }
  return logs;
}

namespace {

// Thrown for problems with the invocation itself (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusFlags {
  std::string src;
  std::string tgt;
  std::string tsv;
  bool lowercase = false;

  void add_to(CLI::App& app, const std::string& tsv_flag = "--tsv") {
    app.add_option("--src", src, "Source side, one sentence per line");
    app.add_option("--tgt", tgt, "Reference side, one sentence per line");
    app.add_option(tsv_flag, tsv, "Two-column TSV corpus (source<TAB>reference)");
    app.add_flag("--lowercase", lowercase, "Lowercase both sides on load");
  }

  ParallelCorpus load() const {
    const LoadOptions options{lowercase};
    if (!tsv.empty()) {
      if (!src.empty() || !tgt.empty()) throw UsageError("give either a TSV corpus or --src/--tgt, not both");
      return load_parallel_tsv(tsv, options);
    }
    if (src.empty() || tgt.empty()) throw UsageError("a corpus is required: --src and --tgt, or a TSV file");
    return load_parallel(src, tgt, options);
  }
};

struct DecodeFlags {
  std::size_t max_gap = kDefaultMaxGap;
  std::size_t max_len = 0;

  void add_to(CLI::App& app, bool with_gap = true) {
    if (with_gap) app.add_option("--max-gap", max_gap, "Longest gap M tried between validated segments")->capture_default_str();
    app.add_option("--max-len", max_len, "Hypothesis length cap (default 2*|source|+5)");
  }

  DecoderConfig config() const {
    DecoderConfig c;
    c.max_gap_len = max_gap;
    if (max_len > 0) c.max_total_len = max_len;
    return c;
  }
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write " + path);
  file << text;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  std::size_t a = 0, b = 0;
  try {
    if (dots == std::string::npos) {
      a = b = std::stoul(text);
    } else {
      std::size_t used = 0;
      a = std::stoul(text.substr(0, dots), &used);
      if (used != dots) throw std::invalid_argument(text);
      const std::string rest = text.substr(dots + 2);
      b = std::stoul(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad range '" + text + "', expected A..B");
  }
  if (a > b) throw UsageError("empty range " + text);
  return {a, b};
}

// key=value lines from a flat config file, as "--key=value" arguments.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::string> args;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      if (first == std::string::npos) return std::string();
      return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
    };
    args.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

// Config-file values go right after the subcommand so that command-line
// flags, which come later, take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& argv) {
  std::optional<std::string> config;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    if (argv[i] == "--config" && i + 1 < argv.size()) config = argv[i + 1];
    else if (argv[i].rfind("--config=", 0) == 0) config = argv[i].substr(9);
  }
  if (!config || argv.size() < 2) return argv;
  std::vector<std::string> out(argv.begin(), argv.begin() + 2);
  const auto extra = config_arguments(*config);
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), argv.begin() + 2, argv.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Segment-based interactive machine translation workbench", "imt"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string model;
  std::string config_path;
  auto add_common = [&](CLI::App& sub, bool needs_model = true) {
    if (needs_model) {
      sub.add_option("--model", model, "Toy model file or scorer service URL (http://host:port)")
          ->envname("IMT_MODEL_PATH")
          ->required();
    }
    sub.add_option("--config", config_path, "Flat key=value file with flag defaults");
  };

  // translate
  auto* translate = app.add_subcommand("translate", "Greedy-decode every line of a source file");
  std::string input;
  DecodeFlags translate_decode;
  bool translate_lowercase = false;
  translate->add_option("--input", input, "Source sentences, one per line")->required();
  translate->add_flag("--lowercase", translate_lowercase, "Lowercase input");
  translate_decode.add_to(*translate, false);
  add_common(*translate);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run simulated IMT sessions over a parallel corpus");
  CorpusFlags sim_corpus;
  DecodeFlags sim_decode;
  std::string report_path, csv_path, log_path;
  std::size_t threads = 1;
  std::size_t max_iterations = SimConfig{}.max_iterations;
  double smooth = 0.0;
  sim_corpus.add_to(*simulate);
  sim_decode.add_to(*simulate);
  simulate->add_option("--out", report_path, "JSON report path (default: stdout)");
  simulate->add_option("--csv", csv_path, "Also write the report as CSV");
  simulate->add_option("--log", log_path, "Session logs as JSON Lines");
  simulate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--max-iterations", max_iterations, "Per-session iteration cap")->check(CLI::PositiveNumber);
  simulate->add_option("--smooth-bleu", smooth, "Floor zero BLEU n-gram matches at this value (off by default)");
  add_common(*simulate);

  // score
  auto* score = app.add_subcommand("score", "BLEU and TER of a hypothesis file against references");
  std::string hyp_path, ref_path, score_out, score_csv;
  bool score_lowercase = false;
  double score_smooth = 0.0;
  score->add_option("--hyp", hyp_path, "Hypotheses, one per line")->required();
  score->add_option("--ref", ref_path, "References, one per line")->required();
  score->add_option("--out", score_out, "JSON report path (default: stdout)");
  score->add_option("--csv", score_csv, "Also write the report as CSV");
  score->add_flag("--lowercase", score_lowercase, "Lowercase both files");
  score->add_option("--smooth-bleu", score_smooth, "Floor zero BLEU n-gram matches at this value");
  add_common(*score, false);

  // tune-gap
  auto* tune = app.add_subcommand("tune-gap", "Pick the max gap length M minimizing KSR on a dev corpus");
  CorpusFlags tune_corpus;
  DecodeFlags tune_decode;
  std::string range_text;
  std::string tune_out;
  std::size_t tune_threads = 1;
  tune_corpus.add_to(*tune, "--dev-corpus");
  tune_decode.add_to(*tune, false);
  tune->add_option("--max-gap-range", range_text, "Inclusive range A..B of M values")->required();
  tune->add_option("--out", tune_out, "JSON result path (default: stdout)");
  tune->add_option("--threads", tune_threads, "Worker threads")->check(CLI::PositiveNumber);
  add_common(*tune);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve live IMT sessions over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string persist;
  std::string cors = "*";
  double idle_minutes = 30.0;
  DecodeFlags serve_decode;
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--persist", persist, "Append accepted sessions to this JSONL file");
  serve->add_option("--cors-origin", cors, "Allowed CORS origin")->capture_default_str();
  serve->add_option("--idle-minutes", idle_minutes, "Evict sessions idle this long")->capture_default_str();
  serve_decode.add_to(*serve);
  add_common(*serve);

  try {
    const std::vector<std::string> argv = expand_config(raw_argv);
    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*translate) {
      const auto sources = load_sentences(input, Side::source, LoadOptions{translate_lowercase});
      if (sources.empty()) throw Error("no input sentences in " + input);
      const auto scorer = open_scorer(model);
      const DecoderConfig config = translate_decode.config();
      for (const auto& src : sources) out << decode(src, *scorer, config).tokens.text() << '\n';
      return kExitOk;
    }

    if (*simulate) {
      const ParallelCorpus corpus = sim_corpus.load();
      if (corpus.pairs.empty()) throw Error("empty corpus");
      const auto scorer = open_scorer(model);
      SimConfig sim;
      sim.max_iterations = max_iterations;
      const auto logs = simulate_corpus(corpus, *scorer, sim_decode.config(), sim, threads);
      BleuOptions bleu_options;
      if (smooth > 0.0) bleu_options.smooth_epsilon = smooth;
      const CorpusScores scores = score_sessions(logs, bleu_options);
      if (!log_path.empty()) write_session_logs(logs, log_path);
      if (!csv_path.empty()) write_text(csv_path, report_csv(scores), out);
      write_text(report_path, report_json(scores), out);
      return kExitOk;
    }

    if (*score) {
      const LoadOptions options{score_lowercase};
      const auto hyps = load_sentences(hyp_path, Side::target, options);
      const auto refs = load_sentences(ref_path, Side::target, options);
      if (hyps.empty() || refs.empty()) throw Error("empty hypothesis or reference file");
      if (hyps.size() != refs.size()) {
        throw Error("line count " + std::to_string(hyps.size()) + " != " + std::to_string(refs.size()));
      }
      BleuOptions bleu_options;
      if (score_smooth > 0.0) bleu_options.smooth_epsilon = score_smooth;
      nlohmann::ordered_json report = {
          {"bleu", bleu(hyps, refs, bleu_options)}, {"ter", corpus_ter(hyps, refs)}, {"sentences", hyps.size()}};
      if (!score_csv.empty()) {
        write_text(score_csv,
                   "bleu,ter,sentences\n" + report["bleu"].dump() + "," + report["ter"].dump() + "," +
                       report["sentences"].dump() + "\n",
                   out);
      }
      write_text(score_out, report.dump(2) + "\n", out);
      return kExitOk;
    }

    if (*tune) {
      const auto [first, last] = parse_range(range_text);
      const ParallelCorpus corpus = tune_corpus.load();
      if (corpus.pairs.empty()) throw Error("empty corpus");
      const auto scorer = open_scorer(model);
      nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
      std::size_t best = first;
      double best_ksr = std::numeric_limits<double>::infinity();
      for (std::size_t m = first; m <= last; ++m) {
        DecoderConfig config = tune_decode.config();
        config.max_gap_len = m;
        const auto logs = simulate_corpus(corpus, *scorer, config, SimConfig{}, tune_threads);
        const double ksr = effort_metrics(logs).ksr;
        sweep.push_back({{"max_gap", m}, {"ksr", ksr}});
        if (ksr < best_ksr) {
          best_ksr = ksr;
          best = m;
        }
      }
      nlohmann::ordered_json result = {{"best_max_gap", best}, {"ksr", best_ksr}, {"sweep", std::move(sweep)}};
      write_text(tune_out, result.dump(2) + "\n", out);
      return kExitOk;
    }

    if (*serve) {
      if (port < 1 || port > 65535) throw UsageError("port must be in 1..65535");
      if (!(idle_minutes > 0.0)) throw UsageError("--idle-minutes must be positive");
      ServiceConfig config;
      config.decoder = serve_decode.config();
      config.cors_origin = cors;
      config.idle_timeout = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double, std::ratio<60>>(idle_minutes));
      if (!persist.empty()) config.persist_path = persist;
      SessionService service(open_scorer(model), config);
      httplib::Server server;
      service.mount(server);
      if (!server.bind_to_port(host, port)) throw UsageError("cannot bind " + host + ":" + std::to_string(port));
      out << "listening on http://" << host << ":" << port << std::endl;
      server.listen_after_bind();
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace imt
