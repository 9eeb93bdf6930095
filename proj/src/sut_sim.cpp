#include "restrl/sut_sim.hpp"

#include <regex>
#include <thread>

#include <httplib.h>

namespace restrl {

namespace {

ResponseRecord json_response(int status, const Json& body, int latency_ms) {
  ResponseRecord rec;
  rec.status = status;
  rec.body = body.dump();
  rec.headers.emplace_back("Content-Type", "application/json");
  rec.latency = std::chrono::milliseconds(latency_ms);
  return rec;
}

ResponseRecord error_response(int status, const std::string& message,
                              int latency_ms) {
  return json_response(status, Json{{"message", message}}, latency_ms);
}

bool is_integer(const Json& v) {
  return v.is_number_integer() || v.is_number_unsigned();
}

std::optional<long long> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

const std::regex& email_regex() {
  static const std::regex re(
      R"(^[\w-]+(\.[\w-]+)*@([\w-]+\.)+[a-zA-Z]+$)");
  return re;
}

bool valid_password(const std::string& s) {
  if (s.size() < 6 || s.size() > 50) return false;
  for (unsigned char c : s)
    if (!std::isalnum(c)) return false;
  return true;
}

std::string query_param(const HttpRequest& request, const std::string& name) {
  for (const auto& [k, v] : request.query)
    if (k == name) return v;
  return "";
}

bool bad_content_type(const HttpRequest& request) {
  for (const auto& [k, v] : request.headers)
    if (k == "Content-Type" && v.find("application/json") == std::string::npos)
      return true;
  return false;
}

}  // namespace

void SimService::reset() {
  next_user_id_ = kFirstUserId;
  next_cart_id_ = kFirstCartId;
  users_.clear();
  emails_.clear();
  carts_.clear();
}

ResponseRecord SimService::handle(const HttpRequest& request) {
  const std::string& path = request.path;
  const int lat = config_.latency_ms;

  if (path == "/register") {
    if (request.method != "POST")
      return error_response(405, "method not allowed", lat);
    return handle_register(request);
  }
  if (path.rfind("/users/", 0) == 0 &&
      path.find('/', 7) == std::string::npos) {
    if (request.method != "GET")
      return error_response(405, "method not allowed", lat);
    return handle_get_user(path.substr(7));
  }
  if (path == "/carts") {
    if (request.method != "POST")
      return error_response(405, "method not allowed", lat);
    return handle_create_cart(request);
  }
  if (path.rfind("/orders/", 0) == 0 &&
      path.find('/', 8) == std::string::npos) {
    if (request.method != "GET")
      return error_response(405, "method not allowed", lat);
    return handle_orders(path.substr(8), request);
  }
  return error_response(404, "no such route", lat);
}

ResponseRecord SimService::handle_register(const HttpRequest& request) {
  const int lat = config_.latency_ms;
  if (bad_content_type(request))
    return error_response(415, "unsupported content type", lat);
  Json body = Json::parse(request.body.value_or(""), nullptr, false);
  if (body.is_discarded() || !body.is_object())
    return error_response(400, "malformed body", lat);

  for (const char* field : {"email", "name", "password"}) {
    if (!body.contains(field))
      return error_response(400, std::string("missing required property: ") + field,
                            lat);
    if (!body[field].is_string())
      return error_response(400, std::string("invalid ") + field, lat);
  }
  const auto email = body["email"].get<std::string>();
  const auto name = body["name"].get<std::string>();
  const auto password = body["password"].get<std::string>();
  if (!std::regex_search(email, email_regex()))
    return error_response(400, "invalid email", lat);
  if (name.empty() || name.size() > 50)
    return error_response(400, "invalid name", lat);
  if (!valid_password(password))
    return error_response(400, "invalid password", lat);
  if (emails_.count(email))
    return error_response(400, "email already registered", lat);

  const long long id = next_user_id_++;
  users_[id] = {email, name};
  emails_.insert(email);
  // "token" is deliberately absent from the published document
  Json out{{"id", id},
           {"email", email},
           {"name", name},
           {"created", "2024-01-15"},
           {"locale", "en-US"},
           {"key", "k-" + std::to_string(id)},
           {"ref", "r-" + std::to_string(id)},
           {"code", "c-" + std::to_string(id)},
           {"serial", "SN" + std::to_string(900000 + id % 100000)},
           {"index", id % 97},
           {"sid", "s-" + std::to_string(7000 + id % 1000)},
           {"nonce", "n-" + std::to_string(31 * (id % 89))},
           {"hash", "h" + std::to_string(2654435761ull * (unsigned long long)id % 100000)},
           {"seq", id % 1009},
           {"profile", Json{{"plan", "free"},
                            {"avatar", "https://img.example/u" +
                                           std::to_string(id) + ".png"}}},
           {"token", "tok-" + std::to_string(id)}};
  return json_response(201, out, lat);
}

ResponseRecord SimService::handle_get_user(const std::string& id_text) {
  const int lat = config_.latency_ms;
  const auto id = parse_int(id_text);
  if (!id || !users_.count(*id))
    return error_response(404, "user not found", lat);
  const auto& u = users_.at(*id);
  Json out{{"id", *id},
           {"email", u.email},
           {"name", u.name},
           {"created", "2024-01-15"},
           {"locale", "en-US"},
           {"profile", Json{{"plan", "free"},
                            {"avatar", "https://img.example/u" +
                                           std::to_string(*id) + ".png"}}}};
  return json_response(200, out, lat);
}

ResponseRecord SimService::handle_create_cart(const HttpRequest& request) {
  const int lat = config_.latency_ms;
  if (bad_content_type(request))
    return error_response(415, "unsupported content type", lat);
  Json body = Json::parse(request.body.value_or(""), nullptr, false);
  if (body.is_discarded() || !body.is_object())
    return error_response(400, "malformed body", lat);
  if (!body.contains("user_id"))
    return error_response(400, "missing required property: user_id", lat);
  if (!is_integer(body["user_id"]))
    return error_response(400, "invalid user_id", lat);
  const long long user_id = body["user_id"].get<long long>();
  if (config_.seeded_faults && user_id == 0)
    return error_response(500, kCartsFaultMessage, lat);
  if (!users_.count(user_id))
    return error_response(400, "unknown user", lat);
  const long long cart_id = next_cart_id_++;
  carts_[cart_id] = user_id;
  return json_response(201,
                       Json{{"cart_id", cart_id},
                            {"opened", "2024-02-01"},
                            {"currency", "USD"}},
                       lat);
}

ResponseRecord SimService::handle_orders(const std::string& user_id_text,
                                         const HttpRequest& request) {
  const int lat = config_.latency_ms;
  // the filter is parsed before the user lookup; that ordering is the bug
  if (config_.seeded_faults &&
      query_param(request, "filter") == "node:relation")
    return error_response(500, kOrdersFaultMessage, lat);

  const auto user_id = parse_int(user_id_text);
  if (!user_id || !users_.count(*user_id))
    return error_response(404, "no orders for user", lat);

  Json orders = Json::array();
  for (const auto& [cart_id, owner] : carts_) {
    if (owner != *user_id) continue;
    orders.push_back(Json{{"order_id", cart_id},
                          {"status", "open"},
                          {"total", 19.99 + static_cast<double>(cart_id)}});
  }
  if (orders.empty()) return error_response(404, "no orders for user", lat);
  return json_response(
      200, Json{{"orders", orders}, {"count", orders.size()}}, lat);
}

namespace {

void mount_sim(httplib::Server& server, SimService& service) {
  auto relay = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest hr;
    hr.method = req.method;
    hr.path = req.path;
    for (const auto& [k, v] : req.params) hr.query.emplace_back(k, v);
    for (const auto& [k, v] : req.headers) hr.headers.emplace_back(k, v);
    if (!req.body.empty()) hr.body = req.body;
    const auto out = service.handle(hr);
    if (service.latency_ms() > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(service.latency_ms()));
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  // one catch-all per method keeps routing identical to the in-process path
  const char* pattern = R"(/(.*))";
  server.Get(pattern, relay);
  server.Post(pattern, relay);
  server.Put(pattern, relay);
  server.Delete(pattern, relay);
  server.Patch(pattern, relay);
}

}  // namespace

void serve_sim(SimService& service, const std::string& host, int port) {
  httplib::Server server;
  mount_sim(server, service);
  server.listen(host, port);
}

struct SimServer::Impl {
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port;
};

SimServer::SimServer(SimService& service, const std::string& host, int port)
    : impl_(std::make_unique<Impl>()) {
  impl_->host = host;
  impl_->port = port;
  mount_sim(impl_->server, service);
  impl_->thread = std::thread(
      [this] { impl_->server.listen(impl_->host, impl_->port); });
}

SimServer::~SimServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

bool SimServer::wait_until_ready(int attempts) {
  for (int i = 0; i < attempts; ++i) {
    if (impl_->server.is_running()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return false;
}

}  // namespace restrl
