#ifndef CHEMSCORE_ENDPOINT_HPP
#define CHEMSCORE_ENDPOINT_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemscore::harness {

class EndpointFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplingParams {
  int max_tokens = 1024;
  double temperature = 0.0;
  std::vector<std::string> stop;
};

struct GenerateResult {
  std::string text;
};

struct ScoreResult {
  std::vector<double> token_logprobs;
  std::vector<std::string> token_texts;
};

// Newline-delimited JSON client for an external model process or server.
// Requests: {"op":"generate"|"score","prompt":...,"sampling":{...}}
// Responses: {"text":...} or {"token_logprobs":[...],"token_texts":[...]}
// or {"error":...}.
class ModelEndpoint {
 public:
  // spec: "cmd:<shell command>" (subprocess pipe) or "tcp:<host>:<port>".
  static ModelEndpoint open(const std::string& spec);

  ModelEndpoint(ModelEndpoint&&) noexcept;
  ModelEndpoint& operator=(ModelEndpoint&&) noexcept;
  ~ModelEndpoint();

  GenerateResult generate(const std::string& prompt);
  ScoreResult score_tokens(const std::string& prompt);

  bool can_generate() const { return can_generate_; }
  bool can_score() const { return can_score_; }
  // Endpoints that declare parallel handling skip request serialization.
  bool parallel() const { return parallel_; }

  SamplingParams sampling;

  class Transport;

 private:
  explicit ModelEndpoint(std::unique_ptr<Transport> transport);

  std::string roundtrip(const std::string& request_line);

  std::unique_ptr<Transport> transport_;
  std::unique_ptr<std::mutex> mutex_;
  bool can_generate_ = true;
  bool can_score_ = true;
  bool parallel_ = false;
};

}  // namespace chemscore::harness

#endif  // CHEMSCORE_ENDPOINT_HPP
