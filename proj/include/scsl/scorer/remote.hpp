#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

#include "scsl/scorer/scorer.hpp"

namespace scsl::scorer {

struct RemoteOptions {
  std::chrono::milliseconds timeout{5000};
  int retries = 2;  // extra attempts after the first
  std::chrono::milliseconds retry_backoff{50};
  int max_in_flight = 8;
};

struct RemoteResult {
  double score = 0.0;
  std::string label;
  std::map<std::string, double> proba;
};

enum class RemoteMode { stance, ideology };

/// Request body for POST /v1/score.
std::string build_score_request(std::optional<std::string_view> target, std::string_view text, RemoteMode mode);

/// Validates and decodes a /v1/score response. Throws ProtocolError.
RemoteResult parse_score_response(std::string_view body);

/// HTTP client for an external scorer service speaking the /v1 protocol.
class RemoteScorer final : public StanceScorer, public LabelPredictor {
 public:
  /// endpoint: http://host:port with an optional path prefix.
  explicit RemoteScorer(std::string endpoint, RemoteOptions options = {});
  ~RemoteScorer() override;

  RemoteResult score(std::optional<std::string_view> target, std::string_view text, RemoteMode mode) const;
  [[nodiscard]] bool healthy() const;

  double score_stance(std::string_view target, std::string_view text) const override;
  double score_ideology(std::string_view text) const override;
  std::string predict_label(std::string_view target, std::string_view text) const override;

 private:
  std::string base_;
  std::string prefix_;
  RemoteOptions options_;
  mutable std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace scsl::scorer
