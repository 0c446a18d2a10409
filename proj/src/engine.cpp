#include "squish/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace squish {

std::string_view to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::OneD:
      return "1d";
    case BodyKind::Ring2D:
      return "ring2d";
    case BodyKind::SpherePolar:
      return "sphere_polar";
    case BodyKind::SphereOcta:
      return "sphere_octa";
  }
  return "unknown";
}

std::optional<BodyKind> parse_body_kind(std::string_view name) {
  for (BodyKind k : {BodyKind::OneD, BodyKind::Ring2D, BodyKind::SpherePolar, BodyKind::SphereOcta}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

LayeredBody build_body(const BodySpec& spec, const SimConfig& cfg) {
  LayeredBody body;
  switch (spec.kind) {
    case BodyKind::OneD:
      return build_1d(spec.p0, spec.p1, cfg.mass, cfg.ks, cfg.kd);
    case BodyKind::Ring2D:
      body = build_ring_2d(spec.n, spec.r_inner, spec.r_outer, cfg);
      break;
    case BodyKind::SpherePolar:
    case BodyKind::SphereOcta: {
      if (!(spec.r_inner > 0.0 && spec.r_inner < spec.r_outer)) {
        throw BuildError("sphere radii must satisfy 0 < r_inner < r_outer");
      }
      const bool polar = spec.kind == BodyKind::SpherePolar;
      const SurfaceMesh inner = polar ? build_sphere_polar(spec.slices, spec.stacks, spec.r_inner)
                                      : build_sphere_octa(spec.iterations, spec.r_inner);
      const SurfaceMesh outer = polar ? build_sphere_polar(spec.slices, spec.stacks, spec.r_outer)
                                      : build_sphere_octa(spec.iterations, spec.r_outer);
      body = link_layers(inner, outer, cfg);
      break;
    }
  }
  Vec3 offset = spec.center;
  if (body.dimension != Dimension::Three) {
    offset.z = 0.0;
  }
  translate(body, offset);
  record_rest_volumes(body);
  return body;
}

Metrics compute_metrics(const LayeredBody& body) {
  Metrics m;
  if (body.dimension != Dimension::One) {
    m.volume_inner = body.inner_springs.empty() ? 0.0 : volume_gauss(body, Layer::Inner);
    m.volume_outer = body.outer_springs.empty() ? 0.0 : volume_gauss(body, Layer::Outer);
  }
  for (const auto* layer : {&body.inner_points, &body.outer_points}) {
    for (const Particle& p : *layer) {
      m.kinetic_energy += 0.5 * p.mass * dot(p.velocity, p.velocity);
      m.max_norm = std::max(m.max_norm, norm(p.position));
      if (!is_finite(p.position)) {
        m.max_norm = std::numeric_limits<double>::infinity();
      }
    }
  }
  body.for_each_container([&](const std::vector<Spring>& springs) {
    for (const Spring& s : springs) {
      const double stretch = norm(body.particle(s.tail).position - body.particle(s.head).position) - s.rest_length;
      m.potential_energy += 0.5 * s.ks * stretch * stretch;
    }
  });
  return m;
}

Simulation::Simulation(LayeredBody body, SimConfig cfg)
    : body_(std::move(body)), cfg_(cfg), integrator_(cfg.integrator) {
  cfg_.validate();
  world_ = WorldBox::from_extents(cfg_.world, body_.spatial_dim());
  divergence_bound_ = 1e3 * world_.diagonal();
  drag_.ks_m = cfg_.mks;
  drag_.kd_m = cfg_.mkd;
  drag_.rest_m = cfg_.drag_rest_length;
  if (body_.dimension != Dimension::One && body_.rest_volume_outer == 0.0) {
    record_rest_volumes(body_);
  }
  refresh_snapshot(0);
}

const Snapshot& Simulation::step() {
  if (snapshot_.diverged) {
    return snapshot_;
  }
  integrator_.set_kind(cfg_.integrator);
  const bool finite = integrator_.step(body_, cfg_, drag_, cfg_.dt, diag_);
  const std::size_t collisions = resolve_world(body_, world_, cfg_.collision, cfg_.surface_epsilon);
  contain_inner(body_, cfg_.layer_epsilon);

  snapshot_.step += 1;
  snapshot_.time += cfg_.dt;
  if (drag_velocity_pending_) {
    drag_.anchor_velocity = Vec3{};
    drag_velocity_pending_ = false;
  }
  refresh_snapshot(collisions);
  if (!finite || !all_finite(pack_state(body_)) || !(snapshot_.metrics.max_norm <= divergence_bound_)) {
    snapshot_.diverged = true;
  }
  return snapshot_;
}

void Simulation::refresh_snapshot(std::size_t collisions) {
  snapshot_.spatial_dim = body_.spatial_dim();
  snapshot_.particles.clear();
  for (const auto* layer : {&body_.inner_points, &body_.outer_points}) {
    for (const Particle& p : *layer) {
      snapshot_.particles.push_back({p.mass, p.position, p.velocity});
    }
  }
  snapshot_.metrics = compute_metrics(body_);
  snapshot_.metrics.collisions = collisions;
  snapshot_.drag = drag_;
}

void Simulation::drag_start(const Vec3& anchor) {
  drag_.target = find_closest_point(body_, anchor);
  drag_.anchor = anchor;
  drag_.anchor_velocity = Vec3{};
  drag_.ks_m = cfg_.mks;
  drag_.kd_m = cfg_.mkd;
  drag_.rest_m = cfg_.drag_rest_length;
  drag_.active = true;
  body_.closest_outer_index = drag_.target;
  last_drag_move_step_ = snapshot_.step;
  snapshot_.drag = drag_;
}

void Simulation::drag_move(const Vec3& anchor) {
  if (!drag_.active) {
    return;
  }
  const std::uint64_t elapsed = std::max<std::uint64_t>(1, snapshot_.step - last_drag_move_step_);
  drag_.anchor_velocity = (anchor - drag_.anchor) / (static_cast<double>(elapsed) * cfg_.dt);
  drag_.anchor = anchor;
  drag_velocity_pending_ = true;
  last_drag_move_step_ = snapshot_.step;
  snapshot_.drag = drag_;
}

void Simulation::drag_end() {
  drag_.active = false;
  drag_.anchor_velocity = Vec3{};
  body_.closest_outer_index.reset();
  snapshot_.drag = drag_;
}

void Simulation::set_param(std::string_view key, double value) {
  squish::set_param(cfg_, key, value);
  apply_coefficients(body_, cfg_);
  drag_.ks_m = cfg_.mks;
  drag_.kd_m = cfg_.mkd;
}

void Simulation::set_integrator(IntegratorKind kind) {
  cfg_.integrator = kind;
  integrator_.set_kind(kind);
}

void validate(const ScenarioScript& script) {
  try {
    script.config.validate();
    build_body(script.body, script.config);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  if (script.snapshot_every == 0) {
    throw ScenarioError("snapshot_every must be >= 1");
  }
  SimConfig running = script.config;
  std::uint64_t previous = 0;
  for (const ScenarioEvent& ev : script.events) {
    const std::string where = "event at step " + std::to_string(ev.step);
    if (ev.step < previous) {
      throw ScenarioError(where + ": events must be sorted by step");
    }
    if (ev.step > script.steps) {
      throw ScenarioError(where + ": beyond the scenario length");
    }
    previous = ev.step;
    if ((ev.type == ScenarioEvent::Type::DragStart || ev.type == ScenarioEvent::Type::DragMove) &&
        !is_finite(ev.anchor)) {
      throw ScenarioError(where + ": drag anchor must be finite");
    }
    if (ev.type == ScenarioEvent::Type::SetParam) {
      try {
        set_param(running, ev.key, ev.value);
      } catch (const ConfigError& e) {
        throw ScenarioError(where + ": " + e.what());
      }
    }
  }
}

RunResult run(const ScenarioScript& script, const std::function<void(const Snapshot&)>& emit) {
  validate(script);
  Simulation sim(build_body(script.body, script.config), script.config);
  RunResult result;
  auto publish = [&](const Snapshot& s) {
    if (emit) {
      emit(s);
    }
    ++result.emitted;
  };

  auto next_event = script.events.begin();
  publish(sim.snapshot());
  while (sim.step_index() < script.steps) {
    for (; next_event != script.events.end() && next_event->step == sim.step_index(); ++next_event) {
      switch (next_event->type) {
        case ScenarioEvent::Type::DragStart:
          sim.drag_start(next_event->anchor);
          break;
        case ScenarioEvent::Type::DragMove:
          sim.drag_move(next_event->anchor);
          break;
        case ScenarioEvent::Type::DragEnd:
          sim.drag_end();
          break;
        case ScenarioEvent::Type::SetParam:
          sim.set_param(next_event->key, next_event->value);
          break;
      }
    }
    const Snapshot& s = sim.step();
    if (s.diverged) {
      publish(s);
      break;
    }
    if (s.step % script.snapshot_every == 0 || s.step == script.steps) {
      publish(s);
    }
  }
  result.final_snapshot = sim.snapshot();
  result.diverged = sim.diverged();
  return result;
}

std::vector<SweepCell> stability_sweep(const BodySpec& body, const SimConfig& base, std::span<const double> dts,
                                       std::span<const IntegratorKind> integrators, std::uint64_t steps) {
  std::vector<SweepCell> table;
  for (double dt : dts) {
    for (IntegratorKind kind : integrators) {
      SimConfig cfg = base;
      cfg.dt = dt;
      cfg.integrator = kind;
      Simulation sim(build_body(body, cfg), cfg);
      SweepCell cell{dt, kind, true, std::nullopt};
      while (sim.step_index() < steps) {
        if (sim.step().diverged) {
          cell.survived = false;
          cell.steps_to_divergence = sim.step_index();
          break;
        }
      }
      table.push_back(cell);
    }
  }
  return table;
}

}  // namespace squish
