#include "imt/simulator.hpp"

#include <algorithm>

#include "imt/errors.hpp"

namespace imt {

TokenSeq SessionLog::initial_hypothesis() const {
  return iterations.empty() ? final_hypothesis : iterations.front().hypothesis_before.tokens;
}

FeedbackStep extract_feedback(const TokenSeq& hypothesis, const TokenSeq& reference,
                              const std::vector<bool>& previously_covered, const CostModel& costs) {
  const std::size_t m = reference.size();
  if (!previously_covered.empty() && previously_covered.size() != m) {
    throw InvalidArgument("coverage vector does not match reference length");
  }
  auto was_covered = [&](std::size_t r) { return !previously_covered.empty() && previously_covered[r]; };

  const auto runs = matched_runs(lcs_match(hypothesis, reference));

  FeedbackStep step;
  step.covered.assign(m, false);

  // Validated segments after merging runs that touch in the reference.
  struct Group {
    std::size_t ref_start;
    std::size_t ref_end;
  };
  std::vector<Group> groups;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const MatchedRun& run = runs[k];
    bool fresh = false;
    for (std::size_t r = run.ref_start; r <= run.ref_end(); ++r) {
      fresh = fresh || !was_covered(r);
      step.covered[r] = true;
    }
    if (fresh) step.cost.mouse_actions += costs.selection(run.length);

    if (!groups.empty() && groups.back().ref_end + 1 == run.ref_start) {
      step.cost.mouse_actions += costs.merge(run.hyp_start - runs[k - 1].hyp_end() - 1);
      groups.back().ref_end = run.ref_end();
    } else {
      groups.push_back({run.ref_start, run.ref_end()});
    }
  }

  std::optional<std::size_t> correction;
  for (std::size_t r = 0; r < m; ++r) {
    if (!step.covered[r]) {
      correction = r;
      break;
    }
  }

  if (correction) {
    step.has_correction = true;
    step.covered[*correction] = true;
    step.cost.mouse_actions += costs.correction_move;
    step.cost.key_strokes += static_cast<std::int64_t>(utf8_length(reference[*correction]));
    step.cost.word_strokes += 1;
  } else if (!runs.empty()) {
    const std::size_t leading = runs.front().hyp_start;
    const std::size_t trailing = hypothesis.size() - 1 - runs.back().hyp_end();
    if (leading > 0) step.cost.mouse_actions += costs.merge(leading);
    if (trailing > 0) step.cost.mouse_actions += costs.merge(trailing);
  }

  bool correction_placed = !correction;
  auto place_correction = [&] {
    step.feedback.segments.push_back({reference.slice(*correction, 1), SegmentKind::correction,
                                      RefSpan{*correction, *correction}});
    correction_placed = true;
  };
  for (const Group& g : groups) {
    if (!correction_placed && *correction < g.ref_start) place_correction();
    step.feedback.segments.push_back(
        {reference.slice(g.ref_start, g.ref_end - g.ref_start + 1), SegmentKind::validated, RefSpan{g.ref_start, g.ref_end}});
  }
  if (!correction_placed) place_correction();
  return step;
}

SessionLog run_session(const TokenSeq& source, const TokenSeq& reference, const Scorer& scorer,
                       const DecoderConfig& decoder_config, const SimConfig& sim_config) {
  if (reference.empty()) throw InvalidArgument("empty reference");
  if (reference.contains(kEos)) throw InvalidArgument("reference contains </s>");
  if (sim_config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");

  DecoderConfig config = decoder_config;
  config.max_total_len = std::max(config.total_len_for(source), reference.size());

  SessionLog log;
  log.source = source;
  log.reference = reference;

  Hypothesis hypothesis = decode(source, scorer, config);
  std::vector<bool> covered(reference.size(), false);
  while (true) {
    if (hypothesis.tokens.tokens() == reference.tokens()) {
      log.final_hypothesis = hypothesis.tokens;
      break;
    }
    if (log.iterations.size() >= sim_config.max_iterations) {
      throw Error("session did not converge within " + std::to_string(sim_config.max_iterations) + " iterations");
    }
    FeedbackStep step = extract_feedback(hypothesis.tokens, reference, covered, sim_config.costs);
    IterationRecord record;
    record.hypothesis_before = std::move(hypothesis);
    record.feedback = step.feedback;
    record.mouse_actions = step.cost.mouse_actions;
    record.key_strokes = step.cost.key_strokes;
    record.word_strokes = step.cost.word_strokes;
    log.totals += step.cost;
    log.iterations.push_back(std::move(record));
    covered = std::move(step.covered);

    if (!step.has_correction) {
      log.final_hypothesis = reference;
      break;
    }
    hypothesis = constrained_decode(source, step.feedback, scorer, config);
  }
  log.totals.mouse_actions += sim_config.costs.accept_final;
  return log;
}

}  // namespace imt
