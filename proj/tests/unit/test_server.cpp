#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "server.hpp"

using namespace squish;
using namespace squish::server;

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::vector<Json> collect(Controller& c, const std::string& text) {
  std::vector<Json> replies;
  c.submit(text, [&](const std::string& frame) { replies.push_back(Json::parse(frame)); });
  return replies;
}

class Client {
 public:
  explicit Client(std::uint16_t port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/ws");
  }
  Json read() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return Json::parse(beast::buffers_to_string(buffer.data()));
  }
  /// Next frame of the given type, skipping others.
  Json read(const std::string& type) {
    for (;;) {
      Json j = read();
      if (j["type"] == type) {
        return j;
      }
    }
  }
  void send(const Json& j) { ws_.write(net::buffer(j.dump())); }
  ~Client() {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

ServerOptions test_options() {
  ServerOptions o;
  o.port = 0;
  o.body.kind = BodyKind::Ring2D;
  return o;
}

}  // namespace

TEST(Controller, ParseErrorAndUnknownTypeAnsweredWithEvents) {
  Controller c(BodySpec{}, SimConfig{});
  auto r = collect(c, "{not json");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["type"], "event");
  EXPECT_EQ(r[0]["code"], "parse_error");
  r = collect(c, R"({"type": "teleport"})");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "unknown_type");
  r = collect(c, R"({"type": "drag_start", "x": 1})");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "bad_message");
  r = collect(c, R"([1])");
  EXPECT_EQ(r[0]["code"], "bad_message");
}

TEST(Controller, RejectedParamLeavesConfigUnchanged) {
  Controller c(BodySpec{}, SimConfig{});
  std::vector<Json> replies;
  c.submit(R"({"type": "set_param", "key": "ks", "value": -1})",
           [&](const std::string& f) { replies.push_back(Json::parse(f)); });
  EXPECT_TRUE(replies.empty());
  c.advance(1);
  ASSERT_EQ(replies.size(), 1u);
  EXPECT_EQ(replies[0]["code"], "rejected");
  EXPECT_EQ(c.config().ks, 800.0);

  replies.clear();
  c.submit(R"({"type": "set_param", "key": "ks", "value": 400})",
           [&](const std::string& f) { replies.push_back(Json::parse(f)); });
  c.advance(1);
  EXPECT_EQ(replies.at(0)["code"], "param_set");
  EXPECT_EQ(c.config().ks, 400.0);
}

TEST(Controller, InputsAppliedOnlyAtStepBoundaries) {
  Controller c(BodySpec{}, SimConfig{});
  c.submit(R"({"type": "set_integrator", "kind": "euler"})", [](const std::string&) {});
  EXPECT_EQ(c.config().integrator, IntegratorKind::RK4);
  c.advance(0);
  EXPECT_EQ(c.config().integrator, IntegratorKind::RK4);
  c.advance(1);
  EXPECT_EQ(c.config().integrator, IntegratorKind::Euler);
}

TEST(Controller, SelectBodyRebuildsTopologyAndKeepsStepsIncreasing) {
  Controller c(BodySpec{}, SimConfig{});
  c.advance(5);
  const std::uint64_t before = c.published_step();
  c.submit(R"({"type": "select_body", "kind": "sphere_octa", "params": {"iterations": 1}})",
           [](const std::string&) {});
  const Controller::Frame f = c.advance(1);
  ASSERT_TRUE(f.topology);
  EXPECT_EQ(Json::parse(*f.topology)["particles"].size(), 36u);
  ASSERT_TRUE(f.snapshot);
  EXPECT_GT(f.step, before);
  EXPECT_EQ(Json::parse(*f.snapshot)["step"], f.step);
}

TEST(Server, HealthEndpoint) {
  Server server(test_options());
  const std::uint16_t port = server.start();
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  beast::tcp_stream stream(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  http::request<http::empty_body> req{http::verb::get, "/health", 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res.body(), R"({"ok":true})");
  server.stop();
}

TEST(Server, ConnectSendsTopologyThenSnapshot) {
  Server server(test_options());
  Client client(server.start());
  const Json first = client.read();
  EXPECT_EQ(first["type"], "topology");
  EXPECT_EQ(first["particles"].size(), 24u);
  const Json second = client.read();
  EXPECT_EQ(second["type"], "snapshot");
  std::uint64_t last = second["step"];
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t step = client.read("snapshot")["step"];
    EXPECT_GT(step, last);
    last = step;
  }
}

TEST(Server, DragDisplacesParticleTowardAnchor) {
  Server server(test_options());
  Client client(server.start());
  client.read("topology");
  const Json snap = client.read("snapshot");
  // Grab the top particle of the ring and pull it straight up.
  std::size_t target = 0;
  double top = -1e9;
  for (std::size_t i = 0; i < snap["particles"].size(); ++i) {
    const double y = snap["particles"][i]["pos"][1];
    if (y > top) {
      top = y;
      target = i;
    }
  }
  const double x = snap["particles"][target]["pos"][0];
  client.send({{"type", "drag_start"}, {"x", x}, {"y", top}});
  client.send({{"type", "drag_move"}, {"x", x}, {"y", top + 4.0}});
  const Vec3 anchor{x, top + 4.0, 0.0};

  // Wait for the first frame in which the drag is visible.
  Json frame;
  do {
    frame = client.read("snapshot");
  } while (!frame["drag"]["active"].get<bool>());
  auto distance = [&](const Json& f) {
    const auto& p = f["particles"][target]["pos"];
    return norm(Vec3{p[0].get<double>(), p[1].get<double>(), 0.0} - anchor);
  };
  double previous = distance(frame);
  const double start = previous;
  for (int i = 0; i < 10; ++i) {
    frame = client.read("snapshot");
    const double d = distance(frame);
    EXPECT_LT(d, previous) << "frame " << i;
    previous = d;
  }
  EXPECT_LT(previous, start);
}

TEST(Server, BadFramesDoNotDisconnect) {
  Server server(test_options());
  Client client(server.start());
  client.send(Json{{"type", "warp"}});
  EXPECT_EQ(client.read("event")["code"], "unknown_type");
  client.send(Json{{"type", "set_param"}, {"key", "ks"}, {"value", -1}});
  EXPECT_EQ(client.read("event")["code"], "rejected");
  EXPECT_EQ(server.controller().config().ks, 800.0);
  EXPECT_EQ(client.read("snapshot")["type"], "snapshot");
}
