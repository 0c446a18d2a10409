#include "squish/collide.hpp"

#include <cmath>
#include <stdexcept>

#include "squish/forces.hpp"

namespace squish {

Plane::Plane(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  scale_ = std::sqrt(a * a + b * b + c * c);
  if (!(scale_ > 0.0)) {
    throw std::invalid_argument("plane normal must be non-zero");
  }
  normal_ = Vec3{a, b, c} / scale_;
}

WorldBox WorldBox::from_extents(const WorldExtents& e, int spatial_dim) {
  if (!(e.min.x < e.max.x && e.min.y < e.max.y && (spatial_dim < 3 || e.min.z < e.max.z))) {
    throw std::invalid_argument("world extents must bound a non-empty region");
  }
  WorldBox box;
  box.planes.emplace_back(0.0, 1.0, 0.0, -e.min.y);
  box.planes.emplace_back(0.0, -1.0, 0.0, e.max.y);
  box.planes.emplace_back(1.0, 0.0, 0.0, -e.min.x);
  box.planes.emplace_back(-1.0, 0.0, 0.0, e.max.x);
  Vec3 span = e.max - e.min;
  if (spatial_dim == 3) {
    box.planes.emplace_back(0.0, 0.0, 1.0, -e.min.z);
    box.planes.emplace_back(0.0, 0.0, -1.0, e.max.z);
  } else {
    span.z = 0.0;
  }
  box.diagonal_ = norm(span);
  return box;
}

Contact classify(const Vec3& p, const Plane& plane, double eps_surface) {
  const double value = plane.distance(p);
  if (value > eps_surface) {
    return Contact::Inside;
  }
  if (value < -eps_surface) {
    return Contact::Penetrating;
  }
  return Contact::OnSurface;
}

Vec3 reflect(const Vec3& offset, const Vec3& n) { return n * (2.0 * dot(offset, n)) - offset; }

bool respond(Particle& p, const Plane& plane, const CollisionParams& cp, double eps_surface) {
  const Contact contact = classify(p.position, plane, eps_surface);
  if (contact == Contact::Inside) {
    return false;
  }
  const Vec3& n = plane.normal();
  const double vn = dot(p.velocity, n);
  if (contact == Contact::OnSurface && vn >= 0.0) {
    return false;
  }
  if (contact == Contact::Penetrating) {
    p.position -= n * plane.distance(p.position);
  }
  if (vn < 0.0) {
    const Vec3 v_normal = n * vn;
    const Vec3 v_tangent = p.velocity - v_normal;
    p.velocity = v_normal * -cp.restitution + v_tangent * cp.friction;
  }
  return true;
}

std::size_t resolve_world(LayeredBody& body, const WorldBox& world, const CollisionParams& cp, double eps_surface) {
  std::size_t count = 0;
  for (Particle& p : body.outer_points) {
    for (const Plane& plane : world.planes) {
      if (respond(p, plane, cp, eps_surface)) {
        ++count;
      }
    }
  }
  return count;
}

std::size_t contain_inner(LayeredBody& body, double eps_layer) {
  if (body.dimension == Dimension::One || body.inner_points.size() != body.outer_points.size()) {
    return 0;
  }
  const Vec3 c = layer_centroid(body, Layer::Outer);
  std::size_t moved = 0;
  for (std::size_t i = 0; i < body.inner_points.size(); ++i) {
    Particle& in = body.inner_points[i];
    const Vec3 to_outer = body.outer_points[i].position - c;
    const double outer_r = norm(to_outer);
    if (!(norm(in.position - c) > outer_r) || outer_r == 0.0) {
      continue;
    }
    in.position = c + to_outer * (1.0 - eps_layer);
    const Vec3 radial = to_outer / outer_r;
    in.velocity -= radial * dot(in.velocity, radial);
    ++moved;
  }
  return moved;
}

}  // namespace squish
