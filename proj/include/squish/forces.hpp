#pragma once

#include <cstddef>

#include "squish/config.hpp"
#include "squish/mesh.hpp"

namespace squish {

/// Non-fatal events raised during a force pass.
struct Diagnostics {
  std::size_t degenerate_springs = 0;
  std::size_t volume_clamps = 0;

  Diagnostics& operator+=(const Diagnostics& o) {
    degenerate_springs += o.degenerate_springs;
    volume_clamps += o.volume_clamps;
    return *this;
  }
};

struct PressureParams {
  double nrt = 20.0;
  bool enabled = true;
};

/// Mouse spring between an anchor point and one outer-layer particle.
struct DragState {
  Vec3 anchor{};
  /// Finite-difference estimate of the anchor's velocity.
  Vec3 anchor_velocity{};
  Index target = 0;
  double ks_m = 150.0;
  double kd_m = 25.0;
  double rest_m = 0.0;
  bool active = false;
};

/// Equal and opposite contributions of one spring.
struct ForcePair {
  Vec3 on_head{};
  Vec3 on_tail{};
};

Vec3 gravity_force(const Particle& p, double g);

/// Hooke force along the spring axis. A zero-length spring yields zero force
/// and bumps `diag->degenerate_springs`.
ForcePair hooke_force(const Spring& s, const Vec3& r1, const Vec3& r2, Diagnostics* diag = nullptr);
ForcePair hooke_force(const Spring& s, const LayeredBody& body, Diagnostics* diag = nullptr);

/// Viscous damping of the relative velocity projected on the spring axis.
ForcePair damping_force(const Spring& s, const Vec3& r1, const Vec3& r2, const Vec3& v1, const Vec3& v2,
                        Diagnostics* diag = nullptr);
ForcePair damping_force(const Spring& s, const LayeredBody& body, Diagnostics* diag = nullptr);

/// Adds hooke + damping of every spring container to the particle force
/// accumulators. With `uniformity_correction` set, each particle's structural
/// sum is scaled by spring_force_scale(valence).
void total_spring_forces(LayeredBody& body, const SimConfig& cfg, Diagnostics& diag);

/// Force on the dragged particle; zero when inactive.
Vec3 drag_force(const DragState& drag, const LayeredBody& body);

/// Outer-layer index nearest to `anchor`, lowest index on ties.
Index find_closest_point(const LayeredBody& body, const Vec3& anchor);

/// Spring rotated 90 degrees about z: (-(y2-y1), x2-x1). Not normalized.
Vec3 spring_normal_2d(const Vec3& r1, const Vec3& r2);

/// Cheap estimate obtained by rotating 90 degrees about z, y and x in turn:
/// (z2-z1, y2-y1, -(x2-x1)). Degenerates for springs along y.
Vec3 spring_normal_3d(const Vec3& r1, const Vec3& r2);

Vec3 layer_centroid(const LayeredBody& body, Layer layer);

/// Refreshes Spring::normal on the layer's structural springs, oriented away
/// from the enclosed region. Planar rings use the sign of the ring's winding;
/// 3D surfaces flip any normal facing the layer centroid.
void update_normals(LayeredBody& body, Layer layer);

/// Enclosed area (2D) or the spring-sum volume estimate (3D):
/// |sum of 0.5 (x1 + x2) n_x L| over the layer's structural springs, n the
/// unit spring normal and L the spring length. Throws for 1D bodies.
double volume_gauss(const LayeredBody& body, Layer layer);

/// P = nrt / V per layer, P * n * L split evenly between a spring's two
/// endpoints. Volumes below `floor_fraction` of the rest volume are clamped.
void pressure_forces(LayeredBody& body, const PressureParams& pp, double floor_fraction, Diagnostics& diag);

/// Full force pass: zero, gravity, structural/radius/shear springs, normals,
/// volumes, pressure (2D/3D only), drag.
void accumulate_forces(LayeredBody& body, const SimConfig& cfg, const DragState& drag, Diagnostics& diag);

/// Stores the current layer volumes as the rest volumes (no-op for 1D).
void record_rest_volumes(LayeredBody& body);

}  // namespace squish
