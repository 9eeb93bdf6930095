#include "restrl/engine.hpp"

#include <algorithm>
#include <set>

#include <httplib.h>

namespace restrl {

std::string to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::DropRequired: return "drop_required";
    case MutationKind::WrongType: return "wrong_type";
    case MutationKind::InvalidContentType: return "invalid_content_type";
    case MutationKind::OversizeString: return "oversize_string";
    case MutationKind::MethodSwap: return "method_swap";
  }
  return "unknown";
}

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string HttpRequest::target() const {
  std::string t = path;
  bool first = true;
  for (const auto& [k, v] : query) {
    t += first ? '?' : '&';
    first = false;
    t += url_encode(k) + "=" + url_encode(v);
  }
  return t;
}

namespace {

std::string value_as_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

HttpRequest build_request(const RequestPlan& plan, const ApiSpec& spec,
                          const std::string& auth_header) {
  const OperationNode* op = spec.find(plan.operation_id);
  HttpRequest req;
  req.method = plan.method;
  req.path = plan.path_template;

  Json body = Json::object();
  bool has_body = false;
  for (const auto& b : plan.bindings) {
    switch (b.location) {
      case ParamLocation::Path: {
        const std::string var = "{" + b.name + "}";
        auto pos = req.path.find(var);
        if (pos == std::string::npos) break;
        req.path.replace(pos, var.size(), url_encode(value_as_text(b.value)));
        break;
      }
      case ParamLocation::Query:
        req.query.emplace_back(b.name, value_as_text(b.value));
        break;
      case ParamLocation::Header:
        req.headers.emplace_back(b.name, value_as_text(b.value));
        break;
      case ParamLocation::Body:
        body[b.name] = b.value;
        has_body = true;
        break;
    }
  }
  // a body-drop mutation can leave the object empty; the operation still
  // declared a body, so send one
  if (!has_body && op && op->request_body) {
    bool declares_body_params = false;
    for (const auto& p : op->parameters)
      if (p.location == ParamLocation::Body) declares_body_params = true;
    if (declares_body_params) has_body = true;
  }

  if (req.path.find('{') != std::string::npos)
    throw UnboundPathVariable("unresolved template in path: " + req.path);

  if (has_body) {
    req.body = body.dump();
    req.headers.emplace_back("Content-Type", "application/json");
  }
  if (!auth_header.empty()) {
    auto colon = auth_header.find(':');
    if (colon != std::string::npos) {
      std::string name = auth_header.substr(0, colon);
      std::string value = auth_header.substr(colon + 1);
      while (!value.empty() && value.front() == ' ') value.erase(0, 1);
      req.headers.emplace_back(name, value);
    }
  }
  for (const auto& [k, v] : plan.header_overrides) {
    bool replaced = false;
    for (auto& [hk, hv] : req.headers)
      if (hk == k) { hv = v; replaced = true; }
    if (!replaced) req.headers.emplace_back(k, v);
  }
  return req;
}

namespace {

const char* kAllMethods[] = {"GET", "PUT", "POST", "DELETE", "PATCH", "HEAD"};

std::vector<MutationKind> applicable_mutations(const RequestPlan& plan,
                                               const OperationNode& op) {
  std::vector<MutationKind> kinds;
  bool any_required = false, any_binding = false, any_string = false;
  for (const auto& b : plan.bindings) {
    any_binding = true;
    // dropping a path segment is not expressible in a URL; skip those
    if (b.required && b.location != ParamLocation::Path) any_required = true;
    if (b.kind == ValueKind::String) any_string = true;
  }
  if (any_required) kinds.push_back(MutationKind::DropRequired);
  if (any_binding) kinds.push_back(MutationKind::WrongType);
  kinds.push_back(MutationKind::InvalidContentType);
  if (any_string) kinds.push_back(MutationKind::OversizeString);
  for (const char* m : kAllMethods)
    if (std::find(op.declared_methods_on_path.begin(),
                  op.declared_methods_on_path.end(),
                  m) == op.declared_methods_on_path.end()) {
      kinds.push_back(MutationKind::MethodSwap);
      break;
    }
  return kinds;
}

}  // namespace

void maybe_mutate(RequestPlan& plan, const OperationNode& op, double rate,
                  Rng& rng) {
  if (rate <= 0.0) return;
  if (rng.uniform() >= rate) return;

  const auto kinds = applicable_mutations(plan, op);
  const MutationKind kind = kinds[rng.index(kinds.size())];
  RandomPolicy policy;

  switch (kind) {
    case MutationKind::DropRequired: {
      std::vector<std::size_t> required;
      for (std::size_t i = 0; i < plan.bindings.size(); ++i)
        if (plan.bindings[i].required &&
            plan.bindings[i].location != ParamLocation::Path)
          required.push_back(i);
      plan.bindings.erase(plan.bindings.begin() +
                          static_cast<long>(required[rng.index(required.size())]));
      break;
    }
    case MutationKind::WrongType: {
      auto& b = plan.bindings[rng.index(plan.bindings.size())];
      b.value = wrong_typed_value(b.kind, policy, rng);
      break;
    }
    case MutationKind::InvalidContentType:
      plan.header_overrides["Content-Type"] = "application/x-bogus";
      break;
    case MutationKind::OversizeString: {
      std::vector<std::size_t> strings;
      for (std::size_t i = 0; i < plan.bindings.size(); ++i)
        if (plan.bindings[i].kind == ValueKind::String) strings.push_back(i);
      auto& b = plan.bindings[strings[rng.index(strings.size())]];
      std::size_t target_len = 1000;
      // exceed the declared bound when one exists
      for (const auto& p : op.parameters)
        if (p.name == b.name && p.constraints.max_length)
          target_len = *p.constraints.max_length + 1 + rng.index(64);
      std::string s(target_len, 'z');
      b.value = s;
      break;
    }
    case MutationKind::MethodSwap: {
      std::vector<std::string> undeclared;
      for (const char* m : kAllMethods)
        if (std::find(op.declared_methods_on_path.begin(),
                      op.declared_methods_on_path.end(),
                      m) == op.declared_methods_on_path.end())
          undeclared.push_back(m);
      plan.method = undeclared[rng.index(undeclared.size())];
      break;
    }
  }
  plan.mutated = true;
  plan.mutation_kind = kind;
}

namespace {

void decompose(const Json& node, const std::string& path,
               std::vector<std::pair<std::string, Json>>& out,
               std::set<std::pair<std::string, std::string>>& seen,
               int depth) {
  if (depth > 16) return;
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string child = path.empty() ? it.key() : path + "." + it.key();
      decompose(it.value(), child, out, seen, depth + 1);
    }
  } else if (node.is_array()) {
    // index stripped: elements flatten under the array's own path
    for (const auto& item : node) decompose(item, path, out, seen, depth + 1);
  } else {
    if (path.empty()) return;
    if (seen.emplace(path, node.dump()).second) out.emplace_back(path, node);
  }
}

std::string leaf_name(const std::string& path) {
  auto pos = path.rfind('.');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

}  // namespace

std::vector<std::pair<std::string, Json>> decompose_response(
    const std::string& body) {
  std::vector<std::pair<std::string, Json>> out;
  Json parsed = Json::parse(body, nullptr, false);
  if (parsed.is_discarded()) return out;
  std::set<std::pair<std::string, std::string>> seen;
  decompose(parsed, "", out, seen, 0);
  return out;
}

std::vector<std::pair<std::string, Json>> record_success(
    DataBank& bank, const RequestPlan& plan, const OperationNode& op,
    const ResponseRecord& response) {
  for (const auto& b : plan.bindings) {
    switch (b.location) {
      case ParamLocation::Path:
      case ParamLocation::Query:
      case ParamLocation::Header:
        bank.add(plan.operation_id, ProducerTarget::Parameters, b.name,
                 b.value);
        break;
      case ParamLocation::Body:
        bank.add(plan.operation_id, ProducerTarget::Body, b.name, b.value);
        break;
    }
  }

  std::set<std::string> documented;
  const auto io = extract_io_names(op);
  documented.insert(io.second.begin(), io.second.end());

  std::vector<std::pair<std::string, Json>> undocumented;
  for (const auto& [path, value] : decompose_response(response.body)) {
    bank.add(plan.operation_id, ProducerTarget::Response, path, value);
    if (!documented.count(leaf_name(path))) undocumented.emplace_back(path, value);
  }
  return undocumented;
}

HttpTransport::HttpTransport(std::string base_url, double timeout_s,
                             std::string auth_header)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
  auto colon = auth_header.find(':');
  if (colon != std::string::npos) {
    auth_name_ = auth_header.substr(0, colon);
    auth_value_ = auth_header.substr(colon + 1);
    while (!auth_value_.empty() && auth_value_.front() == ' ')
      auth_value_.erase(0, 1);
  }
}

ResponseRecord HttpTransport::send(const HttpRequest& request) {
  ResponseRecord rec;
  httplib::Client client(base_url_);
  const auto timeout_sec = static_cast<time_t>(timeout_s_);
  const auto timeout_usec =
      static_cast<time_t>((timeout_s_ - static_cast<double>(timeout_sec)) * 1e6);
  client.set_connection_timeout(timeout_sec, timeout_usec);
  client.set_read_timeout(timeout_sec, timeout_usec);
  client.set_write_timeout(timeout_sec, timeout_usec);

  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (k == "Content-Type") content_type = v;
    else headers.emplace(k, v);
  }

  const std::string target = request.target();
  const auto start = std::chrono::steady_clock::now();
  httplib::Result res;
  if (request.method == "GET") res = client.Get(target, headers);
  else if (request.method == "DELETE") res = client.Delete(target, headers);
  else if (request.method == "HEAD") res = client.Head(target, headers);
  else if (request.method == "POST")
    res = client.Post(target, headers, request.body.value_or(""), content_type);
  else if (request.method == "PUT")
    res = client.Put(target, headers, request.body.value_or(""), content_type);
  else if (request.method == "PATCH")
    res = client.Patch(target, headers, request.body.value_or(""), content_type);
  else
    res = client.Get(target, headers);
  const auto end = std::chrono::steady_clock::now();
  rec.latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start);

  if (!res) {
    switch (res.error()) {
      case httplib::Error::ConnectionTimeout:
      case httplib::Error::Read:
      case httplib::Error::Write:
        rec.transport_error = "Timeout";
        break;
      case httplib::Error::Connection:
        rec.transport_error = "ConnectionRefused";
        break;
      default:
        rec.transport_error = "TransportError";
        break;
    }
    return rec;
  }
  rec.status = res->status;
  for (const auto& [k, v] : res->headers) rec.headers.emplace_back(k, v);
  rec.body = res->body;
  return rec;
}

}  // namespace restrl
