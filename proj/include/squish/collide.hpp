#pragma once

#include <cstddef>
#include <vector>

#include "squish/config.hpp"
#include "squish/mesh.hpp"

namespace squish {

/// Implicit plane a*x + b*y + c*z + d. Points with a positive value are on
/// the legal side.
class Plane {
 public:
  /// Throws std::invalid_argument if (a, b, c) is the zero vector.
  Plane(double a, double b, double c, double d);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  const Vec3& normal() const { return normal_; }

  double evaluate(const Vec3& p) const { return a_ * p.x + b_ * p.y + c_ * p.z + d_; }
  /// Signed distance along the unit normal.
  double distance(const Vec3& p) const { return evaluate(p) / scale_; }

 private:
  double a_, b_, c_, d_;
  double scale_;
  Vec3 normal_;
};

enum class Contact { Inside, OnSurface, Penetrating };

/// Floor, ceiling, then walls (x min, x max, z min, z max); z walls only in 3D.
struct WorldBox {
  std::vector<Plane> planes;

  static WorldBox from_extents(const WorldExtents& extents, int spatial_dim);
  double diagonal() const { return diagonal_; }

 private:
  double diagonal_ = 0.0;
};

Contact classify(const Vec3& p, const Plane& plane, double eps_surface = 1e-9);

/// Mirror image of `offset` about the unit vector `n`: 2 (d.n) n - d.
Vec3 reflect(const Vec3& offset, const Vec3& n);

/// Penalty response. Penetrating particles are moved back onto the plane;
/// when the particle is penetrating or touching with inward velocity, the
/// velocity becomes -e v_n + f v_t. Returns true if anything changed.
bool respond(Particle& p, const Plane& plane, const CollisionParams& cp, double eps_surface = 1e-9);

/// Tests every outer particle against every plane in order and returns the
/// number of responses applied.
std::size_t resolve_world(LayeredBody& body, const WorldBox& world, const CollisionParams& cp,
                          double eps_surface = 1e-9);

/// Pulls inner particles that have escaped past their outer partner (as
/// seen from the outer-layer centroid) back to (1 - eps_layer) of the way to
/// that partner, and drops their radial velocity. Returns the number moved.
std::size_t contain_inner(LayeredBody& body, double eps_layer = 1e-3);

}  // namespace squish
