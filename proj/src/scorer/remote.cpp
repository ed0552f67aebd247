#include "scsl/scorer/remote.hpp"

#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scsl/core/error.hpp"
#include "scsl/core/log.hpp"

namespace scsl::scorer {
namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) throw ValidationError("endpoint must start with http://: '" + endpoint + "'");
  if (endpoint.compare(0, scheme, "http") != 0) throw ValidationError("only http endpoints are supported");
  const auto path = endpoint.find('/', scheme + 3);
  if (path == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, path), prefix};
}

void apply_timeout(httplib::Client& client, std::chrono::milliseconds timeout) {
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

std::string build_score_request(std::optional<std::string_view> target, std::string_view text, RemoteMode mode) {
  nlohmann::ordered_json body;
  body["text"] = std::string(text);
  body["target"] = target ? nlohmann::ordered_json(std::string(*target)) : nlohmann::ordered_json(nullptr);
  body["mode"] = mode == RemoteMode::stance ? "stance" : "ideology";
  return body.dump();
}

RemoteResult parse_score_response(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("scorer response is not valid JSON");
  }
  if (!doc.is_object()) throw ProtocolError("scorer response is not an object");
  const auto score = doc.find("score");
  if (score == doc.end() || !score->is_number()) throw ProtocolError("scorer response lacks a numeric 'score'");
  RemoteResult out;
  out.score = score->get<double>();
  if (!std::isfinite(out.score) || out.score < -1.0 || out.score > 1.0) {
    throw ProtocolError("scorer response score " + std::to_string(out.score) + " outside [-1, 1]");
  }
  if (const auto label = doc.find("label"); label != doc.end()) {
    if (!label->is_string()) throw ProtocolError("scorer response 'label' must be a string");
    out.label = label->get<std::string>();
  }
  if (const auto proba = doc.find("proba"); proba != doc.end()) {
    if (!proba->is_object()) throw ProtocolError("scorer response 'proba' must be an object");
    for (const auto& [k, v] : proba->items()) {
      if (!v.is_number()) throw ProtocolError("scorer response proba values must be numbers");
      const double p = v.get<double>();
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw ProtocolError("scorer response probability outside [0, 1]");
      out.proba[k] = p;
    }
    double total = 0.0;
    for (const auto& [k, p] : out.proba) total += p;
    if (!out.proba.empty() && std::abs(total - 1.0) > 1e-6) {
      throw ProtocolError("scorer response probabilities sum to " + std::to_string(total));
    }
  }
  return out;
}

RemoteScorer::RemoteScorer(std::string endpoint, RemoteOptions options) : options_(options) {
  std::tie(base_, prefix_) = split_endpoint(endpoint);
  if (options_.max_in_flight < 1) throw ValidationError("max_in_flight must be >= 1");
  if (options_.retries < 0) throw ValidationError("retries must be >= 0");
  in_flight_ = std::make_unique<std::counting_semaphore<>>(options_.max_in_flight);
}

RemoteScorer::~RemoteScorer() = default;

RemoteResult RemoteScorer::score(std::optional<std::string_view> target, std::string_view text,
                                 RemoteMode mode) const {
  const auto body = build_score_request(target, text, mode);
  SlotGuard slot(*in_flight_);
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.retry_backoff * attempt);
    httplib::Client client(base_);
    apply_timeout(client, options_.timeout);
    auto res = client.Post(prefix_ + "/v1/score", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      log::debug("scorer request attempt ", attempt + 1, " failed: ", last_error);
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProtocolError("scorer answered HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    return parse_score_response(res->body);
  }
  throw IoError("scorer at " + base_ + prefix_ + " unreachable after " + std::to_string(options_.retries + 1) +
                " attempts: " + last_error);
}

bool RemoteScorer::healthy() const {
  httplib::Client client(base_);
  apply_timeout(client, options_.timeout);
  auto res = client.Get(prefix_ + "/v1/health");
  if (!res || res->status != 200) return false;
  try {
    const auto doc = nlohmann::json::parse(res->body);
    return doc.is_object() && doc.value("status", "") == "ok";
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

double RemoteScorer::score_stance(std::string_view target, std::string_view text) const {
  return score(target, text, RemoteMode::stance).score;
}

double RemoteScorer::score_ideology(std::string_view text) const {
  return score(std::nullopt, text, RemoteMode::ideology).score;
}

std::string RemoteScorer::predict_label(std::string_view target, std::string_view text) const {
  auto res = score(target, text, RemoteMode::stance);
  if (res.label.empty()) throw ProtocolError("scorer response lacks a 'label'");
  return res.label;
}

}  // namespace scsl::scorer
