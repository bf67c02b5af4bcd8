#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

#include "imt/scorer.hpp"

namespace httplib {
class Client;
}

namespace imt {

// Client for an external scorer service:
//
//   GET  /v1/vocab                 -> {"tokens": [...]}
//   POST /v1/next_token_logprobs   {"source": [...], "prefix": [...]}
//                                  -> {"logprobs": {"token": float, ...}}
//
// Every response must cover the whole vocabulary and sum to 1 within 1e-4
// after exponentiation; anything else raises ScorerError.
class HttpScorer final : public Scorer {
 public:
  // `base_url` such as "http://127.0.0.1:8000". Fetches the vocabulary.
  explicit HttpScorer(const std::string& base_url,
                      std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~HttpScorer() override;

  const Vocabulary& vocab() const override { return vocab_; }

 protected:
  LogDist compute_log_dist(const TokenSeq& source, const TokenSeq& prefix) const override;

 private:
  std::unique_ptr<httplib::Client> client_;
  // httplib::Client is not safe for concurrent requests.
  mutable std::mutex mutex_;
  Vocabulary vocab_;
};

// True when `location` names a scorer service rather than a model file.
bool is_scorer_url(const std::string& location);

// Loads a toy model file or connects to a scorer service.
std::shared_ptr<const Scorer> open_scorer(const std::string& location);

}  // namespace imt
