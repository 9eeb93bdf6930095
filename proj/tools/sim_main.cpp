#include <iostream>

#include <CLI11.hpp>

#include "restrl/sut_sim.hpp"

int main(int argc, char** argv) {
  CLI::App app{"restrl-sim: serve the bundled simulated shop service over HTTP"};
  std::string host = "127.0.0.1";
  int port = 8090;
  int latency_ms = 0;
  bool no_faults = false;
  app.add_option("--host", host, "bind address (default 127.0.0.1)");
  app.add_option("--port", port, "port (default 8090)");
  app.add_option("--latency-ms", latency_ms, "artificial delay per request");
  app.add_flag("--no-faults", no_faults, "disable the seeded 500 triggers");

  CLI11_PARSE(app, argc, argv);

  restrl::SimService::Config config;
  config.seeded_faults = !no_faults;
  config.latency_ms = latency_ms;
  restrl::SimService service(config);

  std::cout << "serving simulated shop service on http://" << host << ":"
            << port << "\n";
  restrl::serve_sim(service, host, port);
  return 0;
}
