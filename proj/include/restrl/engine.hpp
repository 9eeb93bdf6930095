#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "restrl/databank.hpp"
#include "restrl/rng.hpp"
#include "restrl/spdg.hpp"
#include "restrl/spec_model.hpp"
#include "restrl/values.hpp"

namespace restrl {

// One value bound to one parameter, with full provenance.
struct Binding {
  std::string name;
  ParamLocation location = ParamLocation::Query;
  ValueKind kind = ValueKind::String;
  bool required = false;
  Json value;
  ValueSource chosen = ValueSource::Random;    // the value agent's action
  ValueSource executed = ValueSource::Random;  // after fallbacks
  std::optional<SpdgEdge> via_edge;            // exploitation of a known edge
  bool random_query = false;                   // exploration without an edge
  std::optional<DataBank::Entry> query_source;
};

enum class MutationKind {
  DropRequired,
  WrongType,
  InvalidContentType,
  OversizeString,
  MethodSwap,
};

std::string to_string(MutationKind kind);

struct RequestPlan {
  std::string operation_id;
  std::string method;
  std::string path_template;
  std::string combo_key;
  std::vector<Binding> bindings;
  bool mutated = false;
  std::optional<MutationKind> mutation_kind;
  std::map<std::string, std::string> header_overrides;
};

struct HttpRequest {
  std::string method;
  std::string path;  // resolved, no query string
  std::vector<std::pair<std::string, std::string>> query;
  std::vector<std::pair<std::string, std::string>> headers;
  std::optional<std::string> body;

  std::string target() const;  // path + encoded query string
};

struct ResponseRecord {
  int status = 0;  // 0 marks a transport error
  std::string transport_error;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds latency{0};

  bool is_transport_error() const { return status == 0; }
  bool is_2xx() const { return status >= 200 && status < 300; }
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual ResponseRecord send(const HttpRequest& request) = 0;
};

// HTTP/1.1 over the wire; timeouts and refused connections come back as
// transport-error records.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, double timeout_s,
                std::string auth_header = "");
  ResponseRecord send(const HttpRequest& request) override;

 private:
  std::string base_url_;
  double timeout_s_;
  std::string auth_name_, auth_value_;
};

std::string url_encode(const std::string& s);

// Resolve the plan into a concrete request: path templates substituted,
// query URL-encoded, body serialized as JSON.
HttpRequest build_request(const RequestPlan& plan, const ApiSpec& spec,
                          const std::string& auth_header = "");

// With probability rate, apply exactly one mutation chosen uniformly from
// the applicable kinds.
void maybe_mutate(RequestPlan& plan, const OperationNode& op, double rate,
                  Rng& rng);

// Depth-first flattening of a JSON body: object keys joined with ".",
// array indices stripped, deduplicated by (path, value). Non-JSON bodies
// yield an empty list.
std::vector<std::pair<std::string, Json>> decompose_response(
    const std::string& body);

// Store the unmutated 2xx outcome; returns the decomposed response fields
// whose leaf names are not documented in the operation's 2xx schemas.
std::vector<std::pair<std::string, Json>> record_success(
    DataBank& bank, const RequestPlan& plan, const OperationNode& op,
    const ResponseRecord& response);

}  // namespace restrl
