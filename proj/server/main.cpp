#include <iostream>

#include "CLI11.hpp"
#include "server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"squish interactive server"};
  squish::server::ServerOptions options;
  std::string body = "ring2d";
  double dt = options.config.dt;
  app.add_option("--port", options.port, "TCP port")->capture_default_str();
  app.add_option("--address", options.address, "bind address")->capture_default_str();
  app.add_option("--body", body, "1d | ring2d | sphere_polar | sphere_octa")->capture_default_str();
  app.add_option("--dt", dt, "time step in seconds")->capture_default_str();
  app.add_option("--static", options.static_root, "directory served over plain HTTP");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto kind = squish::parse_body_kind(body);
    if (!kind) {
      throw std::invalid_argument("unknown body kind: " + body);
    }
    options.body.kind = *kind;
    squish::set_param(options.config, "dt", dt);
    squish::server::Server server(options);
    std::cerr << "listening on " << options.address << ":" << options.port << "\n";
    server.run_until_signal();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
