#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "squish/engine.hpp"
#include "squish/io.hpp"

namespace squish::server {

struct ServerOptions {
  std::string address = "127.0.0.1";
  /// 0 picks a free port; Server::start returns the bound one.
  std::uint16_t port = 8080;
  BodySpec body{};
  SimConfig config{};
  double frame_rate = 60.0;
  /// Upper bound on simulation steps per frame when wall time runs ahead.
  std::size_t max_steps_per_frame = 50;
  /// Directory served for plain HTTP GETs; empty disables static files.
  std::string static_root;
};

/// Delivers one outbound frame to the client that sent the message.
using Reply = std::function<void(const std::string& frame)>;

Json event_frame(std::string_view level, std::string_view code, std::string_view text);

/// Owns the shared simulation. Client messages are parsed immediately but
/// only applied inside advance(), between steps.
class Controller {
 public:
  Controller(const BodySpec& body, const SimConfig& config);

  /// Parses one client frame. Malformed or unknown frames are answered
  /// through `reply` right away; valid ones are queued.
  void submit(const std::string& text, Reply reply);

  struct Frame {
    /// Set when the body was rebuilt since the previous frame.
    std::optional<std::string> topology;
    /// Present when at least one step ran or the body was rebuilt.
    std::optional<std::string> snapshot;
    std::uint64_t step = 0;
  };

  /// Runs up to `steps` steps, draining the input queue before each one.
  Frame advance(std::size_t steps);

  /// Topology and latest snapshot for a newly connected client.
  Frame greeting() const;

  /// True once per divergence, so the caller can announce it.
  bool take_divergence_notice();

  SimConfig config() const;
  std::uint64_t published_step() const;
  double dt() const;

 private:
  struct Command {
    Json message;
    Reply reply;
  };
  void apply(const Command& cmd, Frame& frame);
  void rebuild(Frame& frame);
  std::string snapshot_text() const;
  std::uint64_t published_step_locked() const;

  mutable std::mutex queue_mutex_;
  std::vector<Command> queue_;

  mutable std::mutex state_mutex_;
  std::unique_ptr<Simulation> sim_;
  std::uint64_t step_offset_ = 0;
  std::string topology_;
  std::string latest_snapshot_;
  bool divergence_reported_ = false;
};

/// WebSocket endpoint /ws, GET /health, optional static files. One I/O
/// thread for the sockets, one thread for the simulation loop.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts both threads. Returns the bound port.
  std::uint16_t start();
  void stop();
  /// start() and block until SIGINT/SIGTERM.
  void run_until_signal();

  Controller& controller();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace squish::server
