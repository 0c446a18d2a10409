#include "squish/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "squish/forces.hpp"

namespace squish {

namespace {

using EdgeKey = std::pair<Index, Index>;

EdgeKey undirected(Index a, Index b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

Particle make_particle(const Vec3& position, double mass) {
  Particle p;
  p.mass = mass;
  p.position = position;
  return p;
}

void require_positive_mass(double mass) {
  if (!(mass > 0.0)) {
    throw BuildError("particle mass must be positive");
  }
}

// Adds edge (a, b) unless its unordered pair is already present.
void add_unique_edge(SurfaceMesh& mesh, std::map<EdgeKey, Index>& seen, Index a, Index b) {
  if (seen.emplace(undirected(a, b), static_cast<Index>(mesh.edges.size())).second) {
    mesh.edges.push_back({a, b});
  }
}

void rebuild_edges_from_facets(SurfaceMesh& mesh) {
  mesh.edges.clear();
  std::map<EdgeKey, Index> seen;
  for (const auto& facet : mesh.facets) {
    for (std::size_t k = 0; k < facet.size(); ++k) {
      add_unique_edge(mesh, seen, facet[k], facet[(k + 1) % facet.size()]);
    }
  }
}

Vec3 on_sphere(const Vec3& v, double radius) { return v * (radius / norm(v)); }

}  // namespace

std::string_view to_string(SpringKind kind) {
  switch (kind) {
    case SpringKind::Structural:
      return "structural";
    case SpringKind::Radius:
      return "radius";
    case SpringKind::ShearLeft:
      return "shear_left";
    case SpringKind::ShearRight:
      return "shear_right";
    case SpringKind::Drag:
      return "drag";
    case SpringKind::Collision:
      return "collision";
  }
  return "unknown";
}

std::size_t LayeredBody::spring_count() const {
  std::size_t total = 0;
  for_each_container([&](const std::vector<Spring>& c) { total += c.size(); });
  return total;
}

Particle& LayeredBody::particle(Index i) {
  return i < inner_points.size() ? inner_points[i] : outer_points.at(i - inner_points.size());
}

const Particle& LayeredBody::particle(Index i) const {
  return i < inner_points.size() ? inner_points[i] : outer_points.at(i - inner_points.size());
}

const Spring& LayeredBody::spring(Index i) const {
  const Spring* found = nullptr;
  std::size_t remaining = i;
  for_each_container([&](const std::vector<Spring>& c) {
    if (found != nullptr) {
      return;
    }
    if (remaining < c.size()) {
      found = &c[remaining];
    } else {
      remaining -= c.size();
    }
  });
  if (found == nullptr) {
    throw std::out_of_range("spring index " + std::to_string(i));
  }
  return *found;
}

Spring make_spring(const LayeredBody& body, Index head, Index tail, SpringKind kind, double ks, double kd) {
  if (head == tail) {
    throw BuildError("spring endpoints must differ");
  }
  Spring s;
  s.head = head;
  s.tail = tail;
  s.kind = kind;
  s.ks = ks;
  s.kd = kd;
  s.rest_length = norm(body.particle(tail).position - body.particle(head).position);
  return s;
}

LayeredBody build_1d(Vec3 p0, Vec3 p1, double mass, double ks, double kd) {
  if (p0 == p1) {
    throw BuildError("1D body needs two distinct points");
  }
  require_positive_mass(mass);
  LayeredBody body;
  body.dimension = Dimension::One;
  p0.z = 0.0;
  p1.z = 0.0;
  body.outer_points = {make_particle(p0, mass), make_particle(p1, mass)};
  body.outer_springs.push_back(make_spring(body, 0, 1, SpringKind::Structural, ks, kd));
  return body;
}

LayeredBody build_ring_2d(std::size_t n, double r_inner, double r_outer, const SimConfig& cfg) {
  if (n < 3) {
    throw BuildError("ring needs at least 3 particles per layer");
  }
  if (!(r_inner > 0.0 && r_inner < r_outer)) {
    throw BuildError("ring radii must satisfy 0 < r_inner < r_outer");
  }
  require_positive_mass(cfg.mass);

  LayeredBody body;
  body.dimension = Dimension::Two;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = step * static_cast<double>(i);
    const Vec3 dir{std::cos(theta), std::sin(theta), 0.0};
    body.inner_points.push_back(make_particle(dir * r_inner, cfg.mass));
    body.outer_points.push_back(make_particle(dir * r_outer, cfg.mass));
  }

  const auto nn = static_cast<Index>(n);
  for (Index i = 0; i < nn; ++i) {
    const Index next = (i + 1) % nn;
    body.inner_springs.push_back(make_spring(body, i, next, SpringKind::Structural, cfg.ks, cfg.kd));
    body.outer_springs.push_back(make_spring(body, nn + i, nn + next, SpringKind::Structural, cfg.ks, cfg.kd));
  }
  for (Index i = 0; i < nn; ++i) {
    body.radius_springs.push_back(make_spring(body, i, nn + i, SpringKind::Radius, cfg.rks, cfg.rkd));
  }
  for (Index i = 0; i < nn; ++i) {
    const Index next = (i + 1) % nn;
    body.shear_left.push_back(make_spring(body, i, nn + next, SpringKind::ShearLeft, cfg.rks, cfg.rkd));
    body.shear_right.push_back(make_spring(body, next, nn + i, SpringKind::ShearRight, cfg.rks, cfg.rkd));
  }

  // Annulus triangulation; edge ids follow the body-wide spring order.
  const Index outer_base = nn;
  const Index radius_base = 2 * nn;
  const Index left_base = 3 * nn;
  for (Index i = 0; i < nn; ++i) {
    const Index next = (i + 1) % nn;
    body.outer_faces.push_back(Face{{i, nn + i, nn + next}, {radius_base + i, outer_base + i, left_base + i}});
    body.outer_faces.push_back(Face{{i, nn + next, next}, {left_base + i, radius_base + next, i}});
  }

  record_rest_volumes(body);
  return body;
}

SurfaceMesh build_sphere_polar(std::size_t n_slices, std::size_t n_stacks, double radius) {
  if (n_slices < 3 || n_stacks < 2) {
    throw BuildError("polar sphere needs n_slices >= 3 and n_stacks >= 2");
  }
  if (!(radius > 0.0)) {
    throw BuildError("sphere radius must be positive");
  }
  SurfaceMesh mesh;
  const double d_theta = 2.0 * std::numbers::pi / static_cast<double>(n_slices);
  const double d_phi = std::numbers::pi / static_cast<double>(n_stacks);

  // South pole, latitude rings bottom to top, north pole.
  mesh.vertices.push_back({0.0, 0.0, -radius});
  for (std::size_t j = 1; j < n_stacks; ++j) {
    const double phi = -0.5 * std::numbers::pi + d_phi * static_cast<double>(j);
    for (std::size_t i = 0; i < n_slices; ++i) {
      const double theta = d_theta * static_cast<double>(i);
      mesh.vertices.push_back(
          {radius * std::sin(theta) * std::cos(phi), radius * std::cos(theta) * std::cos(phi), radius * std::sin(phi)});
    }
  }
  const auto north = static_cast<Index>(mesh.vertices.size());
  mesh.vertices.push_back({0.0, 0.0, radius});

  const auto slices = static_cast<Index>(n_slices);
  const auto rings = static_cast<Index>(n_stacks - 1);
  auto at = [&](Index ring, Index slice) { return 1 + ring * slices + slice % slices; };

  for (Index i = 0; i < slices; ++i) {
    mesh.facets.push_back({0, at(0, i + 1), at(0, i)});
  }
  for (Index r = 0; r + 1 < rings; ++r) {
    for (Index i = 0; i < slices; ++i) {
      mesh.facets.push_back({at(r, i), at(r, i + 1), at(r + 1, i + 1), at(r + 1, i)});
    }
  }
  for (Index i = 0; i < slices; ++i) {
    mesh.facets.push_back({north, at(rings - 1, i), at(rings - 1, i + 1)});
  }
  rebuild_edges_from_facets(mesh);
  return mesh;
}

SurfaceMesh build_sphere_octa(std::size_t iterations, double radius) {
  if (!(radius > 0.0)) {
    throw BuildError("sphere radius must be positive");
  }
  SurfaceMesh mesh;
  const double h = radius / std::numbers::sqrt2;
  mesh.vertices = {
      {0.0, 0.0, radius}, {0.0, 0.0, -radius}, {-h, -h, 0.0}, {h, -h, 0.0}, {h, h, 0.0}, {-h, h, 0.0},
  };
  mesh.facets = {{0, 3, 4}, {0, 4, 5}, {0, 5, 2}, {0, 2, 3}, {1, 4, 3}, {1, 5, 4}, {1, 2, 5}, {1, 3, 2}};

  for (std::size_t level = 0; level < iterations; ++level) {
    std::map<EdgeKey, Index> midpoints;
    auto midpoint = [&](Index a, Index b) {
      auto [it, inserted] = midpoints.emplace(undirected(a, b), static_cast<Index>(mesh.vertices.size()));
      if (inserted) {
        mesh.vertices.push_back(on_sphere((mesh.vertices[a] + mesh.vertices[b]) * 0.5, radius));
      }
      return it->second;
    };
    const std::size_t parent_count = mesh.facets.size();
    for (std::size_t f = 0; f < parent_count; ++f) {
      const auto [a, b, c] = std::array<Index, 3>{mesh.facets[f][0], mesh.facets[f][1], mesh.facets[f][2]};
      const Index ab = midpoint(a, b);
      const Index bc = midpoint(b, c);
      const Index ca = midpoint(c, a);
      mesh.facets[f] = {ab, bc, ca};
      mesh.facets.push_back({a, ab, ca});
      mesh.facets.push_back({ab, b, bc});
      mesh.facets.push_back({ca, bc, c});
    }
  }
  rebuild_edges_from_facets(mesh);
  return mesh;
}

LayeredBody link_layers(const SurfaceMesh& inner, const SurfaceMesh& outer, const SimConfig& cfg) {
  if (inner.vertices.size() != outer.vertices.size()) {
    throw BuildError("inner and outer surfaces have different vertex counts");
  }
  if (inner.edges != outer.edges || inner.facets != outer.facets) {
    throw BuildError("inner and outer surfaces have different topology");
  }
  require_positive_mass(cfg.mass);

  LayeredBody body;
  body.dimension = Dimension::Three;
  for (const Vec3& v : inner.vertices) {
    body.inner_points.push_back(make_particle(v, cfg.mass));
  }
  for (const Vec3& v : outer.vertices) {
    body.outer_points.push_back(make_particle(v, cfg.mass));
  }
  const auto n = static_cast<Index>(inner.vertices.size());

  for (const auto& [a, b] : inner.edges) {
    body.inner_springs.push_back(make_spring(body, a, b, SpringKind::Structural, cfg.ks, cfg.kd));
    body.outer_springs.push_back(make_spring(body, n + a, n + b, SpringKind::Structural, cfg.ks, cfg.kd));
  }
  for (Index i = 0; i < n; ++i) {
    Spring s = make_spring(body, i, n + i, SpringKind::Radius, cfg.rks, cfg.rkd);
    if (s.rest_length == 0.0) {
      throw BuildError("inner and outer surfaces coincide; radius springs would be degenerate");
    }
    body.radius_springs.push_back(s);
  }
  for (const auto& [a, b] : inner.edges) {
    body.shear_left.push_back(make_spring(body, a, n + b, SpringKind::ShearLeft, cfg.rks, cfg.rkd));
    body.shear_right.push_back(make_spring(body, b, n + a, SpringKind::ShearRight, cfg.rks, cfg.rkd));
  }

  // Faces reference body-wide spring ids: inner structural springs first,
  // outer structural springs right after.
  std::map<EdgeKey, Index> edge_id;
  for (Index e = 0; e < inner.edges.size(); ++e) {
    edge_id.emplace(undirected(inner.edges[e][0], inner.edges[e][1]), e);
  }
  const auto edge_count = static_cast<Index>(inner.edges.size());
  auto lookup = [&](Index a, Index b) {
    auto it = edge_id.find(undirected(a, b));
    return it == edge_id.end() ? kNoEdge : it->second;
  };
  auto add_triangle = [&](Index a, Index b, Index c) {
    Face in{{a, b, c}, {lookup(a, b), lookup(b, c), lookup(c, a)}};
    Face out = in;
    for (Index& v : out.vertices) {
      v += n;
    }
    for (Index& e : out.edges) {
      if (e != kNoEdge) {
        e += edge_count;
      }
    }
    body.inner_faces.push_back(in);
    body.outer_faces.push_back(out);
  };
  for (const auto& facet : inner.facets) {
    for (std::size_t k = 1; k + 1 < facet.size(); ++k) {
      add_triangle(facet[0], facet[k], facet[k + 1]);
    }
  }

  record_rest_volumes(body);
  return body;
}

double spring_force_scale(std::size_t n_connected) {
  if (n_connected == 0) {
    throw std::invalid_argument("spring_force_scale: particle has no connected springs");
  }
  return 6.0 / static_cast<double>(n_connected);
}

std::vector<std::size_t> structural_valence(const LayeredBody& body) {
  std::vector<std::size_t> valence(body.particle_count(), 0);
  for (const auto* container : {&body.inner_springs, &body.outer_springs}) {
    for (const Spring& s : *container) {
      ++valence[s.head];
      ++valence[s.tail];
    }
  }
  return valence;
}

void translate(LayeredBody& body, const Vec3& offset) {
  for (auto* layer : {&body.inner_points, &body.outer_points}) {
    for (Particle& p : *layer) {
      p.position += offset;
    }
  }
}

void apply_coefficients(LayeredBody& body, const SimConfig& cfg) {
  for (auto* layer : {&body.inner_points, &body.outer_points}) {
    for (Particle& p : *layer) {
      p.mass = cfg.mass;
    }
  }
  for (auto* c : {&body.inner_springs, &body.outer_springs}) {
    for (Spring& s : *c) {
      s.ks = cfg.ks;
      s.kd = cfg.kd;
    }
  }
  for (auto* c : {&body.radius_springs, &body.shear_left, &body.shear_right}) {
    for (Spring& s : *c) {
      s.ks = cfg.rks;
      s.kd = cfg.rkd;
    }
  }
}

}  // namespace squish
