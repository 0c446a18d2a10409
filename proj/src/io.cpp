#include "squish/io.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <string>

namespace squish {

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json vec_to_json(const Vec3& v, int spatial_dim) {
  if (spatial_dim == 3) {
    return Json::array({v.x, v.y, v.z});
  }
  return Json::array({v.x, v.y});
}

Vec3 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) {
    throw ScenarioError("expected a vector of 2 or 3 numbers");
  }
  for (const Json& c : j) {
    if (!c.is_number()) {
      throw ScenarioError("vector components must be numbers");
    }
  }
  return {j[0].get<double>(), j[1].get<double>(), j.size() == 3 ? j[2].get<double>() : 0.0};
}

Json mesh_to_json(const LayeredBody& body) {
  const int dim = body.spatial_dim();
  Json particles = Json::array();
  for (const auto* layer : {&body.inner_points, &body.outer_points}) {
    for (const Particle& p : *layer) {
      particles.push_back({{"m", p.mass}, {"pos", vec_to_json(p.position, dim)}, {"vel", vec_to_json(p.velocity, dim)}});
    }
  }
  Json springs = Json::array();
  body.for_each_container([&](const std::vector<Spring>& container) {
    for (const Spring& s : container) {
      springs.push_back({{"kind", std::string(to_string(s.kind))},
                         {"i", s.head},
                         {"j", s.tail},
                         {"rest", s.rest_length},
                         {"ks", s.ks},
                         {"kd", s.kd}});
    }
  });
  Json faces = Json::array();
  for (const auto* layer : {&body.inner_faces, &body.outer_faces}) {
    for (const Face& f : *layer) {
      faces.push_back(Json::array({f.vertices[0], f.vertices[1], f.vertices[2]}));
    }
  }
  return {{"dimension", static_cast<int>(body.dimension)},
          {"particles", std::move(particles)},
          {"springs", std::move(springs)},
          {"faces", std::move(faces)}};
}

Json snapshot_to_json(const Snapshot& s) {
  Json particles = Json::array();
  for (const ParticleState& p : s.particles) {
    particles.push_back(
        {{"m", p.mass}, {"pos", vec_to_json(p.position, s.spatial_dim)}, {"vel", vec_to_json(p.velocity, s.spatial_dim)}});
  }
  Json drag = {{"active", s.drag.active}};
  if (s.drag.active) {
    drag["anchor"] = vec_to_json(s.drag.anchor, s.spatial_dim);
    drag["target"] = s.drag.target;
  }
  return {{"step", s.step},
          {"time", s.time},
          {"particles", std::move(particles)},
          {"volume_inner", s.metrics.volume_inner},
          {"volume_outer", s.metrics.volume_outer},
          {"ke", s.metrics.kinetic_energy},
          {"pe", s.metrics.potential_energy},
          {"max_norm", s.metrics.max_norm},
          {"collisions", s.metrics.collisions},
          {"drag", std::move(drag)},
          {"diverged", s.diverged}};
}

std::string metrics_csv_header() { return "step,time,volume_inner,volume_outer,ke,pe,max_norm,collisions"; }

std::string metrics_csv_row(const Snapshot& s) {
  const Metrics& m = s.metrics;
  std::string row = std::to_string(s.step);
  for (double v : {s.time, m.volume_inner, m.volume_outer, m.kinetic_energy, m.potential_energy, m.max_norm}) {
    row += ',';
    row += format_double(v);
  }
  row += ',';
  row += std::to_string(m.collisions);
  return row;
}

namespace {

double number(const Json& j, std::string_view what) {
  if (!j.is_number()) {
    throw ScenarioError(std::string{what} + " must be a number");
  }
  return j.get<double>();
}

std::size_t count(const Json& j, std::string_view what) {
  if (!j.is_number_unsigned()) {
    throw ScenarioError(std::string{what} + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

void apply_body_field(BodySpec& spec, const std::string& key, const Json& v) {
  if (key == "p0") {
    spec.p0 = vec_from_json(v);
  } else if (key == "p1") {
    spec.p1 = vec_from_json(v);
  } else if (key == "center") {
    spec.center = vec_from_json(v);
  } else if (key == "n") {
    spec.n = count(v, key);
  } else if (key == "slices") {
    spec.slices = count(v, key);
  } else if (key == "stacks") {
    spec.stacks = count(v, key);
  } else if (key == "iterations") {
    spec.iterations = count(v, key);
  } else if (key == "r_inner") {
    spec.r_inner = number(v, key);
  } else if (key == "r_outer") {
    spec.r_outer = number(v, key);
  } else {
    throw ScenarioError("unknown body parameter: " + key);
  }
}

void apply_config_field(SimConfig& cfg, const std::string& key, const Json& v) {
  if (key == "integrator") {
    const auto kind = v.is_string() ? parse_integrator(v.get<std::string>()) : std::nullopt;
    if (!kind) {
      throw ScenarioError("integrator must be one of euler, midpoint, rk4");
    }
    cfg.integrator = *kind;
  } else if (key == "world") {
    if (!v.is_object() || !v.contains("min") || !v.contains("max")) {
      throw ScenarioError("world must be {min:[...], max:[...]}");
    }
    cfg.world.min = vec_from_json(v["min"]);
    cfg.world.max = vec_from_json(v["max"]);
  } else if (key == "drag_rest_length") {
    cfg.drag_rest_length = number(v, key);
  } else if (key == "surface_epsilon") {
    cfg.surface_epsilon = number(v, key);
  } else if (key == "layer_epsilon") {
    cfg.layer_epsilon = number(v, key);
  } else if (key == "volume_floor_fraction") {
    cfg.volume_floor_fraction = number(v, key);
  } else if (key == "uniformity_correction" && v.is_boolean()) {
    cfg.uniformity_correction = v.get<bool>();
  } else {
    try {
      set_param(cfg, key, number(v, key));
    } catch (const ConfigError& e) {
      throw ScenarioError(std::string("config: ") + e.what());
    }
  }
}

Vec3 anchor_of(const Json& payload) {
  if (payload.contains("anchor")) {
    return vec_from_json(payload["anchor"]);
  }
  if (!payload.contains("x") || !payload.contains("y")) {
    throw ScenarioError("drag events need x and y");
  }
  return {number(payload["x"], "x"), number(payload["y"], "y"),
          payload.contains("z") ? number(payload["z"], "z") : 0.0};
}

ScenarioEvent parse_event(const Json& j) {
  if (!j.is_object() || !j.contains("step") || !j.contains("type") || !j["type"].is_string()) {
    throw ScenarioError("each event needs a step and a type");
  }
  ScenarioEvent ev;
  ev.step = count(j["step"], "event step");
  const std::string type = j["type"].get<std::string>();
  const Json payload = j.contains("payload") ? j["payload"] : j;
  if (!payload.is_object()) {
    throw ScenarioError("event payload must be an object");
  }
  if (type == "drag_start" || type == "drag_move") {
    ev.type = type == "drag_start" ? ScenarioEvent::Type::DragStart : ScenarioEvent::Type::DragMove;
    ev.anchor = anchor_of(payload);
  } else if (type == "drag_end") {
    ev.type = ScenarioEvent::Type::DragEnd;
  } else if (type == "set_param") {
    ev.type = ScenarioEvent::Type::SetParam;
    if (!payload.contains("key") || !payload["key"].is_string() || !payload.contains("value")) {
      throw ScenarioError("set_param needs key and value");
    }
    ev.key = payload["key"].get<std::string>();
    ev.value = number(payload["value"], "value");
  } else {
    throw ScenarioError("unknown event type: " + type);
  }
  return ev;
}

}  // namespace

BodySpec parse_body_spec(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ScenarioError("body needs a kind");
  }
  BodySpec spec;
  const auto kind = parse_body_kind(j["kind"].get<std::string>());
  if (!kind) {
    throw ScenarioError("unknown body kind: " + j["kind"].get<std::string>());
  }
  spec.kind = *kind;
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") {
      continue;
    }
    if (key == "params") {
      if (!v.is_object()) {
        throw ScenarioError("body params must be an object");
      }
      for (const auto& [pk, pv] : v.items()) {
        apply_body_field(spec, pk, pv);
      }
      continue;
    }
    apply_body_field(spec, key, v);
  }
  return spec;
}

ScenarioScript parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ScenarioError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column));
  }
  if (!doc.is_object()) {
    throw ScenarioError("scenario must be a JSON object");
  }
  static const std::set<std::string> known{"body", "config", "events", "steps", "snapshot_every"};
  for (const auto& [key, v] : doc.items()) {
    if (!known.contains(key)) {
      throw ScenarioError("unknown scenario field: " + key);
    }
  }
  if (!doc.contains("body")) {
    throw ScenarioError("scenario needs a body");
  }
  ScenarioScript script;
  script.body = parse_body_spec(doc["body"]);
  if (doc.contains("config")) {
    if (!doc["config"].is_object()) {
      throw ScenarioError("config must be an object");
    }
    for (const auto& [key, v] : doc["config"].items()) {
      apply_config_field(script.config, key, v);
    }
  }
  if (doc.contains("events")) {
    if (!doc["events"].is_array()) {
      throw ScenarioError("events must be an array");
    }
    for (const Json& ev : doc["events"]) {
      script.events.push_back(parse_event(ev));
    }
  }
  script.steps = doc.contains("steps") ? count(doc["steps"], "steps") : 0;
  script.snapshot_every = doc.contains("snapshot_every") ? count(doc["snapshot_every"], "snapshot_every") : 1;
  validate(script);
  return script;
}

}  // namespace squish
