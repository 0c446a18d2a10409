#include "server.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace squish::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

Json event_frame(std::string_view level, std::string_view code, std::string_view text) {
  return {{"type", "event"}, {"level", level}, {"code", code}, {"text", text}};
}

// ---------------------------------------------------------------------------
// Controller

Controller::Controller(const BodySpec& body, const SimConfig& config) {
  Frame ignored;
  sim_ = std::make_unique<Simulation>(build_body(body, config), config);
  rebuild(ignored);
}

namespace {

bool has_number(const Json& j, const char* key) { return j.contains(key) && j[key].is_number(); }

/// Field checks that do not depend on simulation state. Empty when valid.
std::string check_message(const std::string& type, const Json& msg) {
  if (type == "drag_start" || type == "drag_move") {
    return has_number(msg, "x") && has_number(msg, "y") && (!msg.contains("z") || msg["z"].is_number())
               ? ""
               : "drag messages need numeric x and y";
  }
  if (type == "drag_end") {
    return "";
  }
  if (type == "set_param") {
    return msg.contains("key") && msg["key"].is_string() && has_number(msg, "value") ? ""
                                                                                     : "set_param needs key and value";
  }
  if (type == "select_body" || type == "set_integrator") {
    return msg.contains("kind") && msg["kind"].is_string() ? "" : type + " needs a kind";
  }
  return "unknown";
}

}  // namespace

void Controller::submit(const std::string& text, Reply reply) {
  Json msg;
  try {
    msg = Json::parse(text);
  } catch (const Json::parse_error& e) {
    reply(event_frame("error", "parse_error", e.what()).dump());
    return;
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    reply(event_frame("error", "bad_message", "frames must be objects with a string type").dump());
    return;
  }
  const std::string type = msg["type"].get<std::string>();
  const std::string problem = check_message(type, msg);
  if (problem == "unknown") {
    reply(event_frame("warn", "unknown_type", "unknown message type: " + type).dump());
    return;
  }
  if (!problem.empty()) {
    reply(event_frame("error", "bad_message", problem).dump());
    return;
  }
  std::lock_guard lock(queue_mutex_);
  queue_.push_back({std::move(msg), std::move(reply)});
}

void Controller::apply(const Command& cmd, Frame& frame) {
  const Json& msg = cmd.message;
  const std::string type = msg["type"].get<std::string>();
  auto anchor = [&] {
    return Vec3{msg["x"].get<double>(), msg["y"].get<double>(), msg.contains("z") ? msg["z"].get<double>() : 0.0};
  };
  if (type == "drag_start") {
    sim_->drag_start(anchor());
  } else if (type == "drag_move") {
    sim_->drag_move(anchor());
  } else if (type == "drag_end") {
    sim_->drag_end();
  } else if (type == "set_param") {
    const std::string key = msg["key"].get<std::string>();
    const double value = msg["value"].get<double>();
    try {
      sim_->set_param(key, value);
      Json ack = event_frame("info", "param_set", key);
      ack["key"] = key;
      ack["value"] = value;
      cmd.reply(ack.dump());
    } catch (const ConfigError& e) {
      Json rejected = event_frame("error", "rejected", e.what());
      rejected["key"] = key;
      cmd.reply(rejected.dump());
    }
  } else if (type == "set_integrator") {
    const auto kind = parse_integrator(msg["kind"].get<std::string>());
    if (!kind) {
      cmd.reply(event_frame("error", "rejected", "unknown integrator").dump());
      return;
    }
    sim_->set_integrator(*kind);
    cmd.reply(event_frame("info", "integrator_set", to_string(*kind)).dump());
  } else if (type == "select_body") {
    Json spec{{"kind", msg["kind"]}};
    if (msg.contains("params")) {
      spec["params"] = msg["params"];
    }
    try {
      const BodySpec body = parse_body_spec(spec);
      SimConfig cfg = sim_->config();
      auto next = std::make_unique<Simulation>(build_body(body, cfg), cfg);
      step_offset_ = step_offset_ + sim_->step_index() + 1;
      sim_ = std::move(next);
      rebuild(frame);
    } catch (const std::invalid_argument& e) {
      cmd.reply(event_frame("error", "rejected", e.what()).dump());
    }
  }
}

void Controller::rebuild(Frame& frame) {
  Json topo = mesh_to_json(sim_->body());
  topo["type"] = "topology";
  topology_ = topo.dump();
  latest_snapshot_ = snapshot_text();
  divergence_reported_ = false;
  frame.topology = topology_;
  frame.snapshot = latest_snapshot_;
  frame.step = published_step_locked();
}

std::string Controller::snapshot_text() const {
  Json j = snapshot_to_json(sim_->snapshot());
  j["type"] = "snapshot";
  j["step"] = step_offset_ + sim_->step_index();
  return j.dump();
}

Controller::Frame Controller::advance(std::size_t steps) {
  Frame frame;
  std::lock_guard state_lock(state_mutex_);
  bool stepped = false;
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<Command> pending;
    {
      std::lock_guard lock(queue_mutex_);
      pending.swap(queue_);
    }
    for (const Command& cmd : pending) {
      apply(cmd, frame);
    }
    if (sim_->diverged()) {
      break;
    }
    sim_->step();
    stepped = true;
  }
  if (stepped) {
    latest_snapshot_ = snapshot_text();
    frame.snapshot = latest_snapshot_;
    frame.step = published_step_locked();
  }
  return frame;
}

bool Controller::take_divergence_notice() {
  std::lock_guard lock(state_mutex_);
  if (sim_->diverged() && !divergence_reported_) {
    divergence_reported_ = true;
    return true;
  }
  return false;
}

Controller::Frame Controller::greeting() const {
  std::lock_guard lock(state_mutex_);
  return {topology_, latest_snapshot_, published_step_locked()};
}

SimConfig Controller::config() const {
  std::lock_guard lock(state_mutex_);
  return sim_->config();
}

std::uint64_t Controller::published_step() const {
  std::lock_guard lock(state_mutex_);
  return published_step_locked();
}

std::uint64_t Controller::published_step_locked() const { return step_offset_ + sim_->step_index(); }

double Controller::dt() const {
  std::lock_guard lock(state_mutex_);
  return sim_->config().dt;
}

// ---------------------------------------------------------------------------
// Networking

namespace {

class WsSession;

/// Session registry; touched only from the I/O thread.
struct Hub {
  Controller& controller;
  net::io_context& ioc;
  std::set<std::shared_ptr<WsSession>> sessions;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  /// Queues a frame. Snapshots older than one already sent are dropped, as
  /// are snapshots arriving while the client is far behind.
  void send(std::shared_ptr<const std::string> frame, std::optional<std::uint64_t> snapshot_step) {
    if (closed_) {
      return;
    }
    if (snapshot_step) {
      if (sent_snapshot_ && *snapshot_step <= last_step_) {
        return;
      }
      if (queue_.size() > kMaxQueued) {
        return;
      }
      sent_snapshot_ = true;
      last_step_ = *snapshot_step;
    }
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) {
      do_write();
    }
  }

  void close() {
    if (closed_) {
      return;
    }
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).close();
  }

 private:
  static constexpr std::size_t kMaxQueued = 64;

  void on_accept(beast::error_code ec) {
    if (ec) {
      return;
    }
    hub_.sessions.insert(shared_from_this());
    const Controller::Frame hello = hub_.controller.greeting();
    send(std::make_shared<const std::string>(*hello.topology), std::nullopt);
    send(std::make_shared<const std::string>(*hello.snapshot), hello.step);
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      leave();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::weak_ptr<WsSession> weak = weak_from_this();
    net::io_context& ioc = hub_.ioc;
    hub_.controller.submit(text, [weak, &ioc](const std::string& frame) {
      net::post(ioc, [weak, msg = std::make_shared<const std::string>(frame)] {
        if (auto self = weak.lock()) {
          self->send(msg, std::nullopt);
        }
      });
    });
    do_read();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
  }

  void on_write(beast::error_code ec) {
    if (ec) {
      leave();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) {
      do_write();
    }
  }

  void leave() {
    closed_ = true;
    queue_.clear();
    hub_.sessions.erase(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::uint64_t last_step_ = 0;
  bool sent_snapshot_ = false;
  bool closed_ = false;
};

std::string_view mime_type(std::string_view path) {
  const auto dot = path.rfind('.');
  const std::string_view ext = dot == std::string_view::npos ? "" : path.substr(dot);
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Hub& hub, const std::string& static_root)
      : stream_(std::move(socket)), hub_(hub), static_root_(static_root) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

 private:
  void on_read(beast::error_code ec) {
    if (ec) {
      return;
    }
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), hub_)->start(std::move(req_));
        return;
      }
      respond(http::status::not_found, "text/plain", "no such endpoint\n");
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain", "GET only\n");
      return;
    }
    const std::string target(req_.target());
    if (target == "/health") {
      respond(http::status::ok, "application/json", R"({"ok":true})");
      return;
    }
    serve_static(target);
  }

  void serve_static(std::string target) {
    if (static_root_.empty() || target.find("..") != std::string::npos || target.empty() || target[0] != '/') {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    target = target.substr(0, target.find('?'));
    if (target.back() == '/') {
      target += "index.html";
    }
    std::ifstream in(static_root_ + target, std::ios::binary);
    if (!in) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    std::ostringstream body;
    body << in.rdbuf();
    respond(http::status::ok, mime_type(target), body.str());
  }

  void respond(http::status status, std::string_view type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, std::string(type));
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  Hub& hub_;
  const std::string& static_root_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions opts)
      : options(std::move(opts)),
        controller(options.body, options.config),
        acceptor(ioc),
        hub{controller, ioc, {}} {}

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        return;
      }
      std::make_shared<HttpSession>(std::move(socket), hub, options.static_root)->start();
      do_accept();
    });
  }

  void broadcast(const Controller::Frame& frame) {
    auto topology = frame.topology ? std::make_shared<const std::string>(*frame.topology) : nullptr;
    auto snapshot = frame.snapshot ? std::make_shared<const std::string>(*frame.snapshot) : nullptr;
    std::shared_ptr<const std::string> notice;
    if (controller.take_divergence_notice()) {
      notice = std::make_shared<const std::string>(
          event_frame("error", "diverged", "simulation diverged; select_body to restart").dump());
    }
    if (!topology && !snapshot && !notice) {
      return;
    }
    net::post(ioc, [this, topology, snapshot, notice, step = frame.step] {
      for (const auto& session : std::vector(hub.sessions.begin(), hub.sessions.end())) {
        if (topology) {
          session->send(topology, std::nullopt);
        }
        if (snapshot) {
          session->send(snapshot, step);
        }
        if (notice) {
          session->send(notice, std::nullopt);
        }
      }
    });
  }

  void sim_loop() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / options.frame_rate));
    auto next = clock::now();
    double owed = 0.0;
    std::unique_lock lock(stop_mutex);
    while (!stopping) {
      owed += std::chrono::duration<double>(period).count() / controller.dt();
      const auto steps = static_cast<std::size_t>(std::min(owed, static_cast<double>(options.max_steps_per_frame)));
      owed = std::min(owed - static_cast<double>(steps), static_cast<double>(options.max_steps_per_frame));
      lock.unlock();
      broadcast(controller.advance(steps));
      lock.lock();
      next += period;
      stop_cv.wait_until(lock, next, [this] { return stopping; });
    }
  }

  ServerOptions options;
  Controller controller;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  Hub hub;
  std::thread io_thread;
  std::thread sim_thread;
  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopping = false;
  bool running = false;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

Controller& Server::controller() { return impl_->controller; }

std::uint16_t Server::start() {
  Impl& s = *impl_;
  const tcp::endpoint endpoint(net::ip::make_address(s.options.address), s.options.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.do_accept();
  s.running = true;
  s.io_thread = std::thread([&s] {
    auto guard = net::make_work_guard(s.ioc);
    s.ioc.run();
  });
  s.sim_thread = std::thread([&s] { s.sim_loop(); });
  return s.acceptor.local_endpoint().port();
}

void Server::stop() {
  Impl& s = *impl_;
  if (!s.running) {
    return;
  }
  s.running = false;
  {
    std::lock_guard lock(s.stop_mutex);
    s.stopping = true;
  }
  s.stop_cv.notify_all();
  s.sim_thread.join();
  net::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
    for (const auto& session : std::vector(s.hub.sessions.begin(), s.hub.sessions.end())) {
      session->close();
    }
    s.hub.sessions.clear();
    s.ioc.stop();
  });
  s.io_thread.join();
}

void Server::run_until_signal() {
  start();
  std::promise<void> done;
  net::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([&done](beast::error_code, int) { done.set_value(); });
  done.get_future().wait();
  stop();
}

}  // namespace squish::server
