#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "restrl/engine.hpp"

namespace restrl {

// Deterministic in-process shop service: register/users/carts/orders with a
// known value-dependency chain and two seeded 500 triggers. Drives every
// end-to-end test without touching the network.
class SimService {
 public:
  struct Config {
    bool seeded_faults = true;
    int latency_ms = 0;  // reported in-process; slept when served over HTTP
  };

  SimService() = default;
  explicit SimService(Config config) : config_(config) {}

  ResponseRecord handle(const HttpRequest& request);
  void reset();

  int latency_ms() const { return config_.latency_ms; }

  // the two seeded fault messages, for assertions
  static constexpr const char* kOrdersFaultMessage = "filter mishandled";
  static constexpr const char* kCartsFaultMessage = "user index underflow";

 private:
  struct User {
    std::string email;
    std::string name;
  };

  // ids live far outside the random int range and the usual guessable
  // values, so reaching dependent operations requires actual value reuse
  static constexpr long long kFirstUserId = 1000019;
  static constexpr long long kFirstCartId = 500007;

  Config config_;
  long long next_user_id_ = kFirstUserId;
  long long next_cart_id_ = kFirstCartId;
  std::map<long long, User> users_;
  std::set<std::string> emails_;
  std::map<long long, long long> carts_;  // cart id -> user id

  ResponseRecord handle_register(const HttpRequest& request);
  ResponseRecord handle_get_user(const std::string& id_text);
  ResponseRecord handle_create_cart(const HttpRequest& request);
  ResponseRecord handle_orders(const std::string& user_id_text,
                               const HttpRequest& request);
};

// In-process transport: no sockets, latency comes from the service knob.
class SimTransport : public Transport {
 public:
  explicit SimTransport(SimService& service) : service_(service) {}
  ResponseRecord send(const HttpRequest& request) override {
    return service_.handle(request);
  }

 private:
  SimService& service_;
};

// Serve the simulator over loopback HTTP (blocks); used by the standalone
// binary.
void serve_sim(SimService& service, const std::string& host, int port);

// RAII handle for tests: listens on a background thread until destroyed.
class SimServer {
 public:
  SimServer(SimService& service, const std::string& host, int port);
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  bool wait_until_ready(int attempts = 100);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace restrl
