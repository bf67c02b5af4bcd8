#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imt/core.hpp"
#include "imt/decoder.hpp"
#include "imt/scorer.hpp"
#include "imt/simulator.hpp"

namespace httplib {
class Server;
}

namespace imt {

// A live turn as the browser sends it: inclusive token ranges over the
// hypothesis currently on screen, an optional typed word, and the spans the
// user joined by deleting the words between them.
struct SpanTurn {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  // Number of spans that precede the correction, and the typed word.
  std::optional<std::pair<std::size_t, std::string>> correction;
  // k merges span k with span k+1.
  std::vector<std::size_t> merges;
};

struct LiveTurn {
  Feedback feedback;
  EffortTally cost;
  // The whole hypothesis was validated and nothing corrected.
  bool ready_to_accept = false;
};

// Converts a SpanTurn into Feedback and charges it with the simulator's cost
// model. Spans made only of previously forced words are not charged again.
// Throws InvalidArgument for out-of-range, overlapping or unordered spans,
// a malformed correction, or an empty turn.
LiveTurn convert_turn(const Hypothesis& current, const SpanTurn& turn, const CostModel& costs = {});

struct ServiceConfig {
  DecoderConfig decoder;
  CostModel costs;
  std::chrono::steady_clock::duration idle_timeout = std::chrono::minutes(30);
  // Accepted sessions are appended here as JSON Lines when set.
  std::optional<std::filesystem::path> persist_path;
  std::string cors_origin = "*";
};

struct ApiResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

// In-memory live sessions behind the HTTP API:
//
//   POST /api/sessions                 {"source": [...]} or {"text": "..."},
//                                      optional "reference" / "reference_text"
//   GET  /api/sessions/{id}
//   POST /api/sessions/{id}/feedback   {"spans": [[s, e], ...],
//                                       "correction": {"after_segment_rank": r, "word": w},
//                                       "merges": [k, ...]}
//   POST /api/sessions/{id}/accept
//   GET  /api/health
//
// The handlers are callable directly; mount() wires them to a server.
class SessionService {
 public:
  using Clock = std::chrono::steady_clock;

  SessionService(std::shared_ptr<const Scorer> scorer, ServiceConfig config);
  ~SessionService();

  ApiResponse create_session(const nlohmann::json& request);
  ApiResponse get_session(const std::string& id);
  ApiResponse submit_feedback(const std::string& id, const nlohmann::json& request);
  ApiResponse accept_session(const std::string& id);
  ApiResponse health() const;

  // Drops sessions idle since before now - idle_timeout. Returns the count.
  std::size_t evict_idle(Clock::time_point now);
  std::size_t session_count() const;

  void mount(httplib::Server& server);

 private:
  struct LiveSession;

  std::shared_ptr<LiveSession> find(const std::string& id);

  std::shared_ptr<const Scorer> scorer_;
  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions_;
  std::size_t next_id_ = 1;
  std::mutex persist_mutex_;
};

}  // namespace imt
