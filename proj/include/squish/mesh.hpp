#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "squish/config.hpp"
#include "squish/vec.hpp"

namespace squish {

/// Raised by the procedural builders on degenerate input.
class BuildError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Index = std::uint32_t;
inline constexpr Index kNoEdge = std::numeric_limits<Index>::max();

struct Particle {
  double mass = 1.0;
  Vec3 position{};
  Vec3 velocity{};
  Vec3 force{};
  // Integrator stage scratch.
  Vec3 d_position{};
  Vec3 d_velocity{};
};

enum class SpringKind { Structural, Radius, ShearLeft, ShearRight, Drag, Collision };

std::string_view to_string(SpringKind kind);

/// Two-particle link. Endpoints are body-wide particle indices: inner
/// particles come first, then outer particles.
struct Spring {
  Index head = 0;
  Index tail = 0;
  SpringKind kind = SpringKind::Structural;
  double rest_length = 0.0;
  double ks = 0.0;
  double kd = 0.0;
  Vec3 normal{};
};

/// Triangle. `edges` are body-wide spring indices (see LayeredBody::spring);
/// kNoEdge marks a display-only diagonal with no backing spring.
struct Face {
  std::array<Index, 3> vertices{};
  std::array<Index, 3> edges{kNoEdge, kNoEdge, kNoEdge};
};

enum class Dimension { One = 1, Two = 2, Three = 3 };

enum class Layer { Inner, Outer };

/// Single-layer surface produced by the sphere builders, before linking.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  /// Undirected edges, each stored once, in creation order.
  std::vector<std::array<Index, 2>> edges;
  /// Triangles (octahedron, polar caps) and quads (polar body).
  std::vector<std::vector<Index>> facets;
};

/// Two-layer elastic body. A 1D body keeps its particles and spring in the
/// outer containers and leaves every cross-layer container empty.
struct LayeredBody {
  Dimension dimension = Dimension::Two;
  std::vector<Particle> inner_points;
  std::vector<Particle> outer_points;
  std::vector<Spring> inner_springs;
  std::vector<Spring> outer_springs;
  std::vector<Spring> radius_springs;
  std::vector<Spring> shear_left;
  std::vector<Spring> shear_right;
  std::vector<Face> inner_faces;
  std::vector<Face> outer_faces;
  /// Outer-layer index of the particle currently held by the mouse.
  std::optional<Index> closest_outer_index;

  /// Volume (area in 2D) at construction; pressure clamps below a fraction of it.
  double rest_volume_inner = 0.0;
  double rest_volume_outer = 0.0;
  /// Volumes from the latest force pass.
  double volume_inner = 0.0;
  double volume_outer = 0.0;

  std::size_t particle_count() const { return inner_points.size() + outer_points.size(); }
  std::size_t spring_count() const;
  /// 2 for 1D and 2D bodies, 3 for 3D bodies.
  int spatial_dim() const { return dimension == Dimension::Three ? 3 : 2; }

  Particle& particle(Index i);
  const Particle& particle(Index i) const;
  Index outer_offset() const { return static_cast<Index>(inner_points.size()); }

  /// Body-wide spring index order: inner, outer, radius, shear-left, shear-right.
  const Spring& spring(Index i) const;

  template <typename Fn>
  void for_each_container(Fn&& fn) {
    fn(inner_springs);
    fn(outer_springs);
    fn(radius_springs);
    fn(shear_left);
    fn(shear_right);
  }
  template <typename Fn>
  void for_each_container(Fn&& fn) const {
    fn(inner_springs);
    fn(outer_springs);
    fn(radius_springs);
    fn(shear_left);
    fn(shear_right);
  }

  std::vector<Spring>& structural(Layer layer) { return layer == Layer::Inner ? inner_springs : outer_springs; }
  const std::vector<Spring>& structural(Layer layer) const {
    return layer == Layer::Inner ? inner_springs : outer_springs;
  }
  std::vector<Particle>& points(Layer layer) { return layer == Layer::Inner ? inner_points : outer_points; }
  const std::vector<Particle>& points(Layer layer) const {
    return layer == Layer::Inner ? inner_points : outer_points;
  }
};

Spring make_spring(const LayeredBody& body, Index head, Index tail, SpringKind kind, double ks, double kd);

LayeredBody build_1d(Vec3 p0, Vec3 p1, double mass, double ks, double kd);

/// Concentric rings of `n` particles at angles i*360/n, linked by structural,
/// radius and both shear spring families. Faces triangulate the annulus.
LayeredBody build_ring_2d(std::size_t n, double r_inner, double r_outer, const SimConfig& cfg = {});

/// Latitude/longitude sphere with one shared particle per pole.
SurfaceMesh build_sphere_polar(std::size_t n_slices, std::size_t n_stacks, double radius);

/// Octahedron refined `iterations` times by edge-midpoint subdivision.
SurfaceMesh build_sphere_octa(std::size_t iterations, double radius);

/// Joins two surfaces with identical topology: one radius spring per vertex
/// pair, and for each structural edge (a, b) a left shear spring inner a to
/// outer b and a right shear spring inner b to outer a.
LayeredBody link_layers(const SurfaceMesh& inner, const SurfaceMesh& outer, const SimConfig& cfg = {});

/// 6 / n_connected, the per-particle structural force scale for uneven valence.
double spring_force_scale(std::size_t n_connected);

/// Structural valence of every particle (springs touching it within its layer).
std::vector<std::size_t> structural_valence(const LayeredBody& body);

void translate(LayeredBody& body, const Vec3& offset);

/// Rewrites every spring's ks/kd and every particle's mass from `cfg`.
void apply_coefficients(LayeredBody& body, const SimConfig& cfg);

}  // namespace squish
