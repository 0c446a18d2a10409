#include "squish/forces.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "squish/kernels.hpp"
#include "squish/state.hpp"

namespace squish {

namespace {

struct Axis {
  Vec3 unit{};
  double length = 0.0;
};

Axis spring_axis(const Vec3& r1, const Vec3& r2) {
  const Vec3 d = r2 - r1;
  const double len = norm(d);
  if (len == 0.0) {
    return {};
  }
  return {d / len, len};
}

Vec3 raw_normal(const LayeredBody& body, const Vec3& r1, const Vec3& r2) {
  return body.dimension == Dimension::Three ? spring_normal_3d(r1, r2) : spring_normal_2d(r1, r2);
}

// Sum of 0.5 (x1 + x2) n_x L using the normals currently stored on the springs.
double gauss_sum(const LayeredBody& body, const std::vector<Spring>& springs, const std::vector<Vec3>& normals) {
  double sum = 0.0;
  for (std::size_t i = 0; i < springs.size(); ++i) {
    const Vec3& r1 = body.particle(springs[i].head).position;
    const Vec3& r2 = body.particle(springs[i].tail).position;
    const double n_len = norm(normals[i]);
    if (n_len == 0.0) {
      continue;
    }
    const double length = norm(r2 - r1);
    sum += 0.5 * (r1.x + r2.x) * (normals[i].x / n_len) * length;
  }
  return sum;
}

std::vector<Vec3> oriented_normals(const LayeredBody& body, Layer layer) {
  const auto& springs = body.structural(layer);
  std::vector<Vec3> normals(springs.size());
  for (std::size_t i = 0; i < springs.size(); ++i) {
    normals[i] = raw_normal(body, body.particle(springs[i].head).position, body.particle(springs[i].tail).position);
  }
  if (body.dimension == Dimension::Three) {
    const Vec3 c = layer_centroid(body, layer);
    for (std::size_t i = 0; i < springs.size(); ++i) {
      const Vec3 mid = (body.particle(springs[i].head).position + body.particle(springs[i].tail).position) * 0.5;
      if (dot(normals[i], mid - c) < 0.0) {
        normals[i] = -normals[i];
      }
    }
  } else if (gauss_sum(body, springs, normals) < 0.0) {
    // Ring springs run along the cycle, so one sign fixes the whole layer.
    for (Vec3& n : normals) {
      n = -n;
    }
  }
  return normals;
}

void require_closed(const LayeredBody& body) {
  if (body.dimension == Dimension::One) {
    throw std::invalid_argument("volume is undefined for an open 1D body");
  }
}

struct ForceScratch {
  kernels::SpringBatch batch;
  kernels::SpringForceOut out;
  StateVector state;
  std::vector<Vec3> structural_sum;
};

ForceScratch& scratch() {
  thread_local ForceScratch s;
  return s;
}

}  // namespace

Vec3 gravity_force(const Particle& p, double g) { return {0.0, -p.mass * g, 0.0}; }

ForcePair hooke_force(const Spring& s, const Vec3& r1, const Vec3& r2, Diagnostics* diag) {
  const Axis axis = spring_axis(r1, r2);
  if (axis.length == 0.0) {
    if (diag != nullptr) {
      ++diag->degenerate_springs;
    }
    return {};
  }
  const double f = -(axis.length - s.rest_length) * s.ks;
  return {axis.unit * -f, axis.unit * f};
}

ForcePair hooke_force(const Spring& s, const LayeredBody& body, Diagnostics* diag) {
  return hooke_force(s, body.particle(s.head).position, body.particle(s.tail).position, diag);
}

ForcePair damping_force(const Spring& s, const Vec3& r1, const Vec3& r2, const Vec3& v1, const Vec3& v2,
                        Diagnostics* diag) {
  const Axis axis = spring_axis(r1, r2);
  if (axis.length == 0.0) {
    if (diag != nullptr) {
      ++diag->degenerate_springs;
    }
    return {};
  }
  const double d = dot(v2 - v1, axis.unit) * s.kd;
  return {axis.unit * d, axis.unit * -d};
}

ForcePair damping_force(const Spring& s, const LayeredBody& body, Diagnostics* diag) {
  const Particle& p1 = body.particle(s.head);
  const Particle& p2 = body.particle(s.tail);
  return damping_force(s, p1.position, p2.position, p1.velocity, p2.velocity, diag);
}

namespace {

void spring_pass(LayeredBody& body, const std::vector<Spring>& springs, std::span<const double> state,
                 std::vector<Vec3>* redirect, Diagnostics& diag) {
  if (springs.empty()) {
    return;
  }
  ForceScratch& s = scratch();
  const int dim = body.spatial_dim();
  s.batch.assign(springs, dim);
  diag.degenerate_springs += kernels::active().spring_forces(s.batch, state, dim, s.out);
  for (std::size_t i = 0; i < springs.size(); ++i) {
    const Vec3 f{s.out.fx[i], s.out.fy[i], s.out.fz[i]};
    if (redirect != nullptr) {
      (*redirect)[springs[i].head] += f;
      (*redirect)[springs[i].tail] -= f;
    } else {
      body.particle(springs[i].head).force += f;
      body.particle(springs[i].tail).force -= f;
    }
  }
}

void spring_forces_from_state(LayeredBody& body, const SimConfig& cfg, std::span<const double> state,
                              Diagnostics& diag) {
  if (cfg.uniformity_correction) {
    auto& sums = scratch().structural_sum;
    sums.assign(body.particle_count(), Vec3{});
    spring_pass(body, body.inner_springs, state, &sums, diag);
    spring_pass(body, body.outer_springs, state, &sums, diag);
    const auto valence = structural_valence(body);
    for (Index i = 0; i < sums.size(); ++i) {
      if (valence[i] > 0) {
        body.particle(i).force += sums[i] * spring_force_scale(valence[i]);
      }
    }
  } else {
    spring_pass(body, body.inner_springs, state, nullptr, diag);
    spring_pass(body, body.outer_springs, state, nullptr, diag);
  }
  spring_pass(body, body.radius_springs, state, nullptr, diag);
  spring_pass(body, body.shear_left, state, nullptr, diag);
  spring_pass(body, body.shear_right, state, nullptr, diag);
}

}  // namespace

void total_spring_forces(LayeredBody& body, const SimConfig& cfg, Diagnostics& diag) {
  auto& state = scratch().state;
  pack_state(body, state);
  spring_forces_from_state(body, cfg, state, diag);
}

Vec3 drag_force(const DragState& drag, const LayeredBody& body) {
  if (!drag.active || drag.target >= body.outer_points.size()) {
    return {};
  }
  const Particle& p = body.outer_points[drag.target];
  const Axis axis = spring_axis(p.position, drag.anchor);
  if (axis.length == 0.0) {
    return {};
  }
  const double f = (axis.length - drag.rest_m) * drag.ks_m + dot(drag.anchor_velocity - p.velocity, axis.unit) * drag.kd_m;
  return axis.unit * f;
}

Index find_closest_point(const LayeredBody& body, const Vec3& anchor) {
  if (body.outer_points.empty()) {
    throw std::invalid_argument("body has no outer particles");
  }
  Index best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < body.outer_points.size(); ++i) {
    const Vec3 d = body.outer_points[i].position - anchor;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

Vec3 spring_normal_2d(const Vec3& r1, const Vec3& r2) { return {-(r2.y - r1.y), r2.x - r1.x, 0.0}; }

Vec3 spring_normal_3d(const Vec3& r1, const Vec3& r2) { return {r2.z - r1.z, r2.y - r1.y, -(r2.x - r1.x)}; }

Vec3 layer_centroid(const LayeredBody& body, Layer layer) {
  const auto& pts = body.points(layer);
  Vec3 c{};
  for (const Particle& p : pts) {
    c += p.position;
  }
  return pts.empty() ? c : c / static_cast<double>(pts.size());
}

void update_normals(LayeredBody& body, Layer layer) {
  require_closed(body);
  const auto normals = oriented_normals(body, layer);
  auto& springs = body.structural(layer);
  for (std::size_t i = 0; i < springs.size(); ++i) {
    springs[i].normal = normals[i];
  }
}

double volume_gauss(const LayeredBody& body, Layer layer) {
  require_closed(body);
  const auto& springs = body.structural(layer);
  if (body.dimension == Dimension::Two) {
    std::vector<Vec3> normals(springs.size());
    for (std::size_t i = 0; i < springs.size(); ++i) {
      normals[i] = spring_normal_2d(body.particle(springs[i].head).position, body.particle(springs[i].tail).position);
    }
    return std::abs(gauss_sum(body, springs, normals));
  }
  return std::abs(gauss_sum(body, springs, oriented_normals(body, layer)));
}

void pressure_forces(LayeredBody& body, const PressureParams& pp, double floor_fraction, Diagnostics& diag) {
  if (!pp.enabled || body.dimension == Dimension::One || pp.nrt == 0.0) {
    return;
  }
  for (Layer layer : {Layer::Inner, Layer::Outer}) {
    auto& springs = body.structural(layer);
    if (springs.empty()) {
      continue;
    }
    update_normals(body, layer);
    std::vector<Vec3> normals(springs.size());
    for (std::size_t i = 0; i < springs.size(); ++i) {
      normals[i] = springs[i].normal;
    }
    double volume = std::abs(gauss_sum(body, springs, normals));
    const double rest = layer == Layer::Inner ? body.rest_volume_inner : body.rest_volume_outer;
    const double floor = floor_fraction * rest;
    (layer == Layer::Inner ? body.volume_inner : body.volume_outer) = volume;
    if (!(volume > floor) || volume == 0.0) {
      ++diag.volume_clamps;
      if (floor <= 0.0) {
        continue;
      }
      volume = floor;
    }
    const double pressure = pp.nrt / volume;
    for (const Spring& s : springs) {
      // |normal| equals the spring length in both 2D and 3D.
      const Vec3 half = s.normal * (0.5 * pressure);
      body.particle(s.head).force += half;
      body.particle(s.tail).force += half;
    }
  }
}

void accumulate_forces(LayeredBody& body, const SimConfig& cfg, const DragState& drag, Diagnostics& diag) {
  for (auto* layer : {&body.inner_points, &body.outer_points}) {
    for (Particle& p : *layer) {
      p.force = Vec3{};
    }
  }
  if (cfg.gravity != 0.0) {
    for (auto* layer : {&body.inner_points, &body.outer_points}) {
      for (Particle& p : *layer) {
        p.force += gravity_force(p, cfg.gravity);
      }
    }
  }
  total_spring_forces(body, cfg, diag);

  if (body.dimension != Dimension::One) {
    if (cfg.pressure_nrt != 0.0) {
      pressure_forces(body, PressureParams{cfg.pressure_nrt, true}, cfg.volume_floor_fraction, diag);
    } else {
      body.volume_inner = body.inner_springs.empty() ? 0.0 : volume_gauss(body, Layer::Inner);
      body.volume_outer = body.outer_springs.empty() ? 0.0 : volume_gauss(body, Layer::Outer);
    }
  }

  if (drag.active && drag.target < body.outer_points.size()) {
    body.outer_points[drag.target].force += drag_force(drag, body);
  }
}

void record_rest_volumes(LayeredBody& body) {
  if (body.dimension == Dimension::One) {
    return;
  }
  body.rest_volume_inner = body.inner_springs.empty() ? 0.0 : volume_gauss(body, Layer::Inner);
  body.rest_volume_outer = body.outer_springs.empty() ? 0.0 : volume_gauss(body, Layer::Outer);
  body.volume_inner = body.rest_volume_inner;
  body.volume_outer = body.rest_volume_outer;
}

}  // namespace squish
