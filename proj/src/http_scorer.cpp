#include "imt/http_scorer.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "imt/errors.hpp"
#include "imt/toy_model.hpp"

namespace imt {

namespace {

constexpr double kWireTolerance = 1e-4;

nlohmann::json parse_body(const httplib::Result& res, const std::string& what) {
  if (!res) throw ScorerError(what + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw ScorerError(what + ": HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(what + ": malformed JSON: " + e.what());
  }
}

}  // namespace

HttpScorer::HttpScorer(const std::string& base_url, std::chrono::milliseconds timeout)
    : client_(std::make_unique<httplib::Client>(base_url)) {
  client_->set_connection_timeout(timeout);
  client_->set_read_timeout(timeout);
  client_->set_write_timeout(timeout);

  const auto body = parse_body(client_->Get("/v1/vocab"), "GET /v1/vocab");
  try {
    vocab_ = Vocabulary(body.at("tokens").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(std::string("GET /v1/vocab: bad payload: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ScorerError(std::string("GET /v1/vocab: ") + e.what());
  }
}

HttpScorer::~HttpScorer() = default;

LogDist HttpScorer::compute_log_dist(const TokenSeq& source, const TokenSeq& prefix) const {
  const nlohmann::json request = {{"source", source.tokens()}, {"prefix", prefix.tokens()}};
  nlohmann::json body;
  {
    std::lock_guard lock(mutex_);
    body = parse_body(client_->Post("/v1/next_token_logprobs", request.dump(), "application/json"),
                      "POST /v1/next_token_logprobs");
  }

  LogDist dist(vocab_.size(), kLogZero);
  std::vector<bool> seen(vocab_.size(), false);
  try {
    for (const auto& [token, value] : body.at("logprobs").items()) {
      const auto id = vocab_.find(token);
      if (!id) throw ScorerError("scorer returned token outside its vocabulary: " + token);
      // JSON has no -inf; null stands for log(0).
      const double lp = value.is_null() ? kLogZero : value.get<double>();
      if (std::isnan(lp) || lp > 0.0) throw ScorerError("invalid log-probability for " + token);
      dist[*id] = std::max(lp, kLogZero);
      seen[*id] = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(std::string("bad logprobs payload: ") + e.what());
  }

  double mass = 0.0;
  for (TokenId id = 0; id < dist.size(); ++id) {
    if (!seen[id]) throw ScorerError("scorer response misses token " + vocab_.token(id));
    mass += std::exp(dist[id]);
  }
  if (std::abs(mass - 1.0) > kWireTolerance) {
    throw ScorerError("scorer distribution sums to " + std::to_string(mass));
  }
  return dist;
}

bool is_scorer_url(const std::string& location) {
  return location.rfind("http://", 0) == 0;
}

std::shared_ptr<const Scorer> open_scorer(const std::string& location) {
  if (is_scorer_url(location)) return std::make_shared<HttpScorer>(location);
  return std::make_shared<ToyModel>(load_toy_model(location));
}

}  // namespace imt
