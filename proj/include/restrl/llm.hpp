#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "restrl/spec_model.hpp"

namespace restrl {

struct LlmRequest {
  std::string operation_id;
  std::string parameter;
  ValueKind kind = ValueKind::String;
  ConstraintSet constraints;
  std::optional<std::string> format;
  std::vector<Json> spec_examples;
  const SchemaNode* schema = nullptr;  // for array/object recursion
  int count = 10;
};

struct LlmClientConfig {
  std::string endpoint;      // chat-completions style URL; empty selects the stub
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.8;
  std::string api_key_env = "RESTRL_LLM_API_KEY";
  int timeout_s = 30;
};

// Produces candidate values for one parameter. Implementations: a
// deterministic constraint-directed stub (the default) and a chat-completions
// HTTP transport.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // One generation call; throws TransportFailure / MalformedCompletion.
  virtual std::vector<Json> generate(const LlmRequest& request) = 0;
  int transport_calls() const { return transport_calls_; }

 protected:
  int transport_calls_ = 0;
};

// Pure function of (request, seed): bit-identical candidates across runs and
// platforms. Values are built from constraints directly — enum first, then
// known pattern shapes, then length-padded alphanumerics.
class StubLlmClient : public LlmClient {
 public:
  explicit StubLlmClient(std::uint64_t seed = 0) : seed_(seed) {}
  std::vector<Json> generate(const LlmRequest& request) override;

 private:
  std::uint64_t seed_;
};

class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(LlmClientConfig config);
  std::vector<Json> generate(const LlmRequest& request) override;

  // the chat prompt is a stable fixture; exposed for tests
  static std::string build_prompt(const LlmRequest& request);

 private:
  LlmClientConfig config_;
  std::string api_key_;
};

// Caching front end: at most one generation per (operation, parameter) per
// session; candidates violating a present pattern are filtered before the
// cache is written.
class LlmValueService {
 public:
  explicit LlmValueService(std::shared_ptr<LlmClient> client)
      : client_(std::move(client)) {}

  // Cached candidate list for the request; may be empty when every candidate
  // was filtered out or the transport failed (caller falls back to RANDOM).
  const std::vector<Json>& values(const LlmRequest& request);

  LlmClient& client() { return *client_; }

 private:
  std::shared_ptr<LlmClient> client_;
  std::map<std::pair<std::string, std::string>, std::vector<Json>> cache_;
};

// Matches value against an OpenAPI-style regex pattern; patterns std::regex
// cannot compile (e.g. \pL classes) are treated as unfilterable and pass.
bool matches_pattern_or_unfilterable(const std::string& value,
                                     const std::string& pattern);

}  // namespace restrl
