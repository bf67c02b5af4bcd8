#include "imt/session_service.hpp"

#include <algorithm>
#include <cstdio>

#include <httplib.h>

#include "imt/corpus_io.hpp"
#include "imt/errors.hpp"
#include "imt/metrics.hpp"

namespace imt {

LiveTurn convert_turn(const Hypothesis& current, const SpanTurn& turn, const CostModel& costs) {
  const std::size_t n = current.size();
  if (turn.spans.empty() && !turn.correction) throw InvalidArgument("empty turn");

  for (std::size_t k = 0; k < turn.spans.size(); ++k) {
    const auto [start, end] = turn.spans[k];
    if (start > end || end >= n) throw InvalidArgument("span " + std::to_string(k) + " out of range");
    if (k > 0 && start <= turn.spans[k - 1].second) {
      throw InvalidArgument("span " + std::to_string(k) + " overlaps or precedes the previous span");
    }
  }
  if (turn.correction) {
    const auto& [rank, word] = *turn.correction;
    if (rank > turn.spans.size()) throw InvalidArgument("correction rank out of range");
    if (!is_valid_token(word) || word == kEos || word == kUnk) {
      throw InvalidArgument("correction must be a single word");
    }
  }
  std::vector<bool> merge_next(turn.spans.size(), false);
  for (std::size_t k : turn.merges) {
    if (k + 1 >= turn.spans.size()) throw InvalidArgument("merge index out of range");
    if (turn.correction && turn.correction->first == k + 1) {
      throw InvalidArgument("cannot merge across the correction");
    }
    merge_next[k] = true;
  }

  LiveTurn out;
  const bool whole = turn.spans.size() == 1 && turn.spans[0].first == 0 && turn.spans[0].second + 1 == n;
  if (whole && !turn.correction && turn.merges.empty()) {
    out.ready_to_accept = true;
    out.feedback.segments.push_back({current.tokens, SegmentKind::validated, std::nullopt});
    return out;
  }

  auto add_correction = [&] {
    out.feedback.segments.push_back(
        {TokenSeq({turn.correction->second}, Side::target), SegmentKind::correction, std::nullopt});
    out.cost.mouse_actions += costs.correction_move;
    out.cost.key_strokes += static_cast<std::int64_t>(utf8_length(turn.correction->second));
    out.cost.word_strokes += 1;
  };

  bool continuing = false;
  for (std::size_t k = 0; k < turn.spans.size(); ++k) {
    if (turn.correction && turn.correction->first == k) add_correction();
    const auto [start, end] = turn.spans[k];
    const bool fresh = std::any_of(current.provenance.begin() + static_cast<std::ptrdiff_t>(start),
                                   current.provenance.begin() + static_cast<std::ptrdiff_t>(end + 1),
                                   [](Provenance p) { return p == Provenance::generated; });
    if (fresh) out.cost.mouse_actions += costs.selection(end - start + 1);

    const TokenSeq words = current.tokens.slice(start, end - start + 1);
    if (continuing) {
      out.feedback.segments.back().words.append(words);
      out.cost.mouse_actions += costs.merge(start - turn.spans[k - 1].second - 1);
    } else {
      out.feedback.segments.push_back({words, SegmentKind::validated, std::nullopt});
    }
    continuing = merge_next[k];
  }
  if (turn.correction && turn.correction->first == turn.spans.size()) add_correction();

  const auto& first = out.feedback.segments.front();
  out.feedback.open_start = first.kind == SegmentKind::validated && turn.spans.front().first > 0;
  return out;
}

struct SessionService::LiveSession {
  std::string id;
  TokenSeq source;
  std::optional<TokenSeq> reference;
  Hypothesis current;
  EffortTally accumulated;
  std::vector<IterationRecord> history;
  bool accepted = false;
  Clock::time_point last_used;
  std::mutex mutex;
};

namespace {

using nlohmann::ordered_json;

ordered_json effort_json(const EffortTally& e) {
  return {{"ws", e.word_strokes}, {"ks", e.key_strokes}, {"ma", e.mouse_actions}};
}

ApiResponse error_response(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

TokenSeq read_tokens(const nlohmann::json& request, const char* array_key, const char* text_key, Side side) {
  if (request.contains(array_key)) {
    return TokenSeq(request.at(array_key).get<std::vector<std::string>>(), side);
  }
  if (request.contains(text_key)) {
    return TokenSeq::from_text(normalize_nfc(request.at(text_key).get<std::string>()), side);
  }
  return TokenSeq({}, side);
}

SpanTurn parse_turn(const nlohmann::json& request) {
  SpanTurn turn;
  if (request.contains("spans")) {
    for (const auto& span : request.at("spans")) {
      const auto pair = span.get<std::vector<long long>>();
      if (pair.size() != 2 || pair[0] < 0 || pair[1] < 0) throw InvalidArgument("span must be [start, end]");
      turn.spans.emplace_back(static_cast<std::size_t>(pair[0]), static_cast<std::size_t>(pair[1]));
    }
  }
  if (request.contains("correction") && !request.at("correction").is_null()) {
    const auto& c = request.at("correction");
    const auto rank = c.at("after_segment_rank").get<long long>();
    if (rank < 0) throw InvalidArgument("correction rank out of range");
    turn.correction.emplace(static_cast<std::size_t>(rank), c.at("word").get<std::string>());
    turn.correction->second = normalize_nfc(turn.correction->second);
  }
  if (request.contains("merges")) {
    for (const auto& k : request.at("merges")) {
      const auto v = k.get<long long>();
      if (v < 0) throw InvalidArgument("merge index out of range");
      turn.merges.push_back(static_cast<std::size_t>(v));
    }
  }
  return turn;
}

}  // namespace

SessionService::SessionService(std::shared_ptr<const Scorer> scorer, ServiceConfig config)
    : scorer_(std::move(scorer)), config_(std::move(config)) {
  if (!scorer_) throw InvalidArgument("session service needs a scorer");
}

SessionService::~SessionService() = default;

std::shared_ptr<SessionService::LiveSession> SessionService::find(const std::string& id) {
  evict_idle(Clock::now());
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

namespace {

ordered_json session_view(const std::string& id, const TokenSeq& source, const std::optional<TokenSeq>& reference,
                          const Hypothesis& current, const EffortTally& effort, std::size_t iterations, bool accepted) {
  std::string provenance;
  for (Provenance p : current.provenance) provenance.push_back(static_cast<char>(p));
  ordered_json view = {{"id", id},
                       {"state", accepted ? "accepted" : "open"},
                       {"source", source.tokens()},
                       {"hypothesis", current.tokens.tokens()},
                       {"provenance", provenance},
                       {"effort", effort_json(effort)},
                       {"iterations", iterations}};
  if (reference) view["reference"] = reference->tokens();
  return view;
}

}  // namespace

ApiResponse SessionService::create_session(const nlohmann::json& request) {
  evict_idle(Clock::now());
  auto session = std::make_shared<LiveSession>();
  try {
    session->source = read_tokens(request, "source", "text", Side::source);
    TokenSeq reference = read_tokens(request, "reference", "reference_text", Side::target);
    if (!reference.empty()) session->reference = std::move(reference);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, std::string("bad request: ") + e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
  if (session->source.empty()) return error_response(400, "empty source");

  try {
    session->current = decode(session->source, *scorer_, config_.decoder);
  } catch (const Error& e) {
    return error_response(502, e.what());
  }
  session->last_used = Clock::now();

  {
    std::lock_guard lock(mutex_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%08zx", next_id_++);
    session->id = buf;
    sessions_.emplace(session->id, session);
  }
  return {201, session_view(session->id, session->source, session->reference, session->current, session->accumulated,
                            0, false)};
}

ApiResponse SessionService::get_session(const std::string& id) {
  auto session = find(id);
  if (!session) return error_response(404, "unknown session " + id);
  std::lock_guard lock(session->mutex);
  session->last_used = Clock::now();
  return {200, session_view(session->id, session->source, session->reference, session->current, session->accumulated,
                            session->history.size(), session->accepted)};
}

ApiResponse SessionService::submit_feedback(const std::string& id, const nlohmann::json& request) {
  auto session = find(id);
  if (!session) return error_response(404, "unknown session " + id);
  std::lock_guard lock(session->mutex);
  if (session->accepted) return error_response(409, "session already accepted");
  session->last_used = Clock::now();

  LiveTurn turn;
  try {
    turn = convert_turn(session->current, parse_turn(request), config_.costs);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, std::string("bad request: ") + e.what());
  } catch (const Error& e) {
    return error_response(422, e.what());
  }

  if (!turn.ready_to_accept) {
    DecoderConfig decoder = config_.decoder;
    decoder.max_total_len = std::max(decoder.total_len_for(session->source), turn.feedback.forced_length());
    Hypothesis next;
    try {
      next = constrained_decode(session->source, turn.feedback, *scorer_, decoder);
    } catch (const InvalidArgument& e) {
      return error_response(422, e.what());
    } catch (const Error& e) {
      return error_response(502, e.what());
    }
    IterationRecord record;
    record.hypothesis_before = session->current;
    record.feedback = turn.feedback;
    record.mouse_actions = turn.cost.mouse_actions;
    record.key_strokes = turn.cost.key_strokes;
    record.word_strokes = turn.cost.word_strokes;
    session->history.push_back(std::move(record));
    session->accumulated += turn.cost;
    session->current = std::move(next);
  }

  ordered_json body = session_view(session->id, session->source, session->reference, session->current,
                                   session->accumulated, session->history.size(), false);
  body["delta"] = effort_json(turn.cost);
  body["ready_to_accept"] = turn.ready_to_accept;
  if (session->reference) body["matches_reference"] = session->current.tokens.tokens() == session->reference->tokens();
  return {200, std::move(body)};
}

ApiResponse SessionService::accept_session(const std::string& id) {
  auto session = find(id);
  if (!session) return error_response(404, "unknown session " + id);
  std::lock_guard lock(session->mutex);
  if (session->accepted) return error_response(409, "session already accepted");
  session->accepted = true;
  session->last_used = Clock::now();
  session->accumulated.mouse_actions += config_.costs.accept_final;

  // The accepted translation is the session's reference by definition.
  SessionLog log;
  log.source = session->source;
  log.reference = session->current.tokens;
  log.iterations = session->history;
  log.final_hypothesis = session->current.tokens;
  log.totals = session->accumulated;

  ordered_json body = session_view(session->id, session->source, session->reference, session->current,
                                   session->accumulated, session->history.size(), true);
  body["totals"] = effort_json(session->accumulated);
  if (!log.final_hypothesis.empty()) {
    const SessionLog single[] = {log};
    const EffortRatios ratios = effort_metrics(single);
    body["wsr"] = ratios.wsr;
    body["ksr"] = ratios.ksr;
    body["mar"] = ratios.mar;
  }
  if (config_.persist_path) {
    std::lock_guard persist(persist_mutex_);
    try {
      append_session_log(log, *config_.persist_path);
    } catch (const Error& e) {
      body["persist_error"] = e.what();
    }
  }
  return {200, std::move(body)};
}

ApiResponse SessionService::health() const { return {200, {{"status", "ok"}}}; }

std::size_t SessionService::evict_idle(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  std::size_t evicted = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      // A session busy decoding holds its lock and is by definition not idle.
      std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
      idle = session_lock.owns_lock() && now - it->second->last_used > config_.idle_timeout;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++evicted;
    } else {
      ++it;
    }
  }
  return evicted;
}

std::size_t SessionService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionService::mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req) -> std::optional<nlohmann::json> {
    if (req.body.empty()) return nlohmann::json::object();
    try {
      auto j = nlohmann::json::parse(req.body);
      if (!j.is_object()) return std::nullopt;
      return j;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  };

  server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
  server.Post("/api/sessions", [this, reply, parse](const httplib::Request& req, httplib::Response& res) {
    auto body = parse(req);
    reply(res, body ? create_session(*body) : error_response(400, "malformed JSON"));
  });
  server.Get(R"(/api/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, get_session(req.matches[1]));
  });
  server.Post(R"(/api/sessions/([^/]+)/feedback)",
              [this, reply, parse](const httplib::Request& req, httplib::Response& res) {
                auto body = parse(req);
                reply(res, body ? submit_feedback(req.matches[1], *body) : error_response(400, "malformed JSON"));
              });
  server.Post(R"(/api/sessions/([^/]+)/accept)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, accept_session(req.matches[1]));
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  const std::string origin = config_.cors_origin;
  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

}  // namespace imt
