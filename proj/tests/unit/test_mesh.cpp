#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles/oracles.hpp"
#include "squish/mesh.hpp"

using namespace squish;

namespace {

std::vector<std::vector<std::size_t>> facets_of(const SurfaceMesh& m) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& f : m.facets) {
    out.emplace_back(f.begin(), f.end());
  }
  return out;
}

std::vector<oracle::P3> points_of(const std::vector<Particle>& pts) {
  std::vector<oracle::P3> out;
  for (const Particle& p : pts) {
    out.push_back({p.position.x, p.position.y, p.position.z});
  }
  return out;
}

}  // namespace

TEST(OctaSphere, BaseCounts) {
  const SurfaceMesh m = build_sphere_octa(0, 1.0);
  EXPECT_EQ(m.vertices.size(), 6u);
  EXPECT_EQ(m.edges.size(), 12u);
  EXPECT_EQ(m.facets.size(), 8u);
}

TEST(OctaSphere, CountsMatchOracleThroughLevelFour) {
  for (std::size_t k = 0; k <= 4; ++k) {
    const SurfaceMesh m = build_sphere_octa(k, 2.0);
    const auto expected = oracle::octa_subdivided(k);
    const auto walked = oracle::count_polyhedron(m.vertices.size(), facets_of(m));
    EXPECT_EQ(m.vertices.size(), expected.vertices) << "level " << k;
    EXPECT_EQ(m.edges.size(), expected.edges) << "level " << k;
    EXPECT_EQ(m.facets.size(), expected.faces) << "level " << k;
    EXPECT_EQ(walked.edges, m.edges.size());
    EXPECT_EQ(walked.euler(), 2);
  }
  const SurfaceMesh one = build_sphere_octa(1, 1.0);
  EXPECT_EQ(one.vertices.size(), 18u);
  EXPECT_EQ(one.edges.size(), 48u);
  EXPECT_EQ(one.facets.size(), 32u);
}

TEST(OctaSphere, VerticesOnSphere) {
  for (double r : {0.5, 1.0, 3.7}) {
    for (std::size_t k = 0; k <= 4; ++k) {
      for (const Vec3& v : build_sphere_octa(k, r).vertices) {
        EXPECT_LE(std::abs(norm(v) - r), 1e-12 * r);
      }
    }
  }
}

TEST(OctaSphere, FacesOrientedOutward) {
  const SurfaceMesh m = build_sphere_octa(2, 1.0);
  for (const auto& f : m.facets) {
    const Vec3 n = cross(m.vertices[f[1]] - m.vertices[f[0]], m.vertices[f[2]] - m.vertices[f[0]]);
    EXPECT_GT(dot(n, m.vertices[f[0]]), 0.0);
  }
}

TEST(OctaSphere, RejectsBadRadius) {
  EXPECT_THROW(build_sphere_octa(1, 0.0), BuildError);
  EXPECT_THROW(build_sphere_octa(1, -1.0), BuildError);
}

TEST(PolarSphere, CountsMatchGridOracle) {
  for (std::size_t s : {3u, 4u, 10u, 17u}) {
    for (std::size_t t : {2u, 3u, 10u, 12u}) {
      const SurfaceMesh m = build_sphere_polar(s, t, 1.0);
      const auto expected = oracle::polar_grid(s, t);
      EXPECT_EQ(m.vertices.size(), expected.vertices);
      EXPECT_EQ(m.edges.size(), expected.edges);
      EXPECT_EQ(m.facets.size(), expected.faces);
      EXPECT_EQ(oracle::count_polyhedron(m.vertices.size(), facets_of(m)).euler(), 2);
    }
  }
}

TEST(PolarSphere, VerticesOnSphereAndPolesFirstLast) {
  const double r = 2.5;
  for (std::size_t s : {3u, 10u, 24u}) {
    for (std::size_t t : {2u, 10u, 24u}) {
      const SurfaceMesh m = build_sphere_polar(s, t, r);
      for (const Vec3& v : m.vertices) {
        EXPECT_LE(std::abs(norm(v) - r), 1e-12 * r);
      }
      EXPECT_EQ(m.vertices.front().z, -r);
      EXPECT_EQ(m.vertices.back().z, r);
    }
  }
}

TEST(PolarSphere, RejectsDegenerateGrid) {
  EXPECT_THROW(build_sphere_polar(2, 10, 1.0), BuildError);
  EXPECT_THROW(build_sphere_polar(10, 1, 1.0), BuildError);
  EXPECT_THROW(build_sphere_polar(10, 10, 0.0), BuildError);
}

TEST(Ring, CountsAndLayout) {
  const LayeredBody b = build_ring_2d(12, 1.5, 2.0);
  EXPECT_EQ(b.dimension, Dimension::Two);
  EXPECT_EQ(b.inner_points.size(), 12u);
  EXPECT_EQ(b.outer_points.size(), 12u);
  EXPECT_EQ(b.inner_springs.size(), 12u);
  EXPECT_EQ(b.outer_springs.size(), 12u);
  EXPECT_EQ(b.radius_springs.size(), 12u);
  EXPECT_EQ(b.shear_left.size(), 12u);
  EXPECT_EQ(b.shear_right.size(), 12u);
  EXPECT_EQ(b.outer_faces.size(), 24u);
  for (std::size_t i = 0; i < 12; ++i) {
    const double theta = 2.0 * M_PI * static_cast<double>(i) / 12.0;
    EXPECT_NEAR(b.outer_points[i].position.x, 2.0 * std::cos(theta), 1e-14);
    EXPECT_NEAR(b.inner_points[i].position.y, 1.5 * std::sin(theta), 1e-14);
  }
  EXPECT_NEAR(b.rest_volume_outer, 0.5 * 12 * 4.0 * std::sin(2.0 * M_PI / 12), 1e-12);
}

TEST(Ring, RejectsDegenerateInput) {
  EXPECT_THROW(build_ring_2d(2, 1.0, 2.0), BuildError);
  EXPECT_THROW(build_ring_2d(12, 2.0, 2.0), BuildError);
  EXPECT_THROW(build_ring_2d(12, 0.0, 2.0), BuildError);
  SimConfig cfg;
  cfg.mass = 0.0;
  EXPECT_THROW(build_ring_2d(12, 1.0, 2.0, cfg), BuildError);
}

TEST(OneD, TwoParticlesOneSpring) {
  const LayeredBody b = build_1d({0, 6, 0}, {0, 5, 0}, 2.0, 10.0, 1.0);
  EXPECT_EQ(b.particle_count(), 2u);
  EXPECT_EQ(b.spring_count(), 1u);
  EXPECT_DOUBLE_EQ(b.outer_springs[0].rest_length, 1.0);
  EXPECT_DOUBLE_EQ(b.outer_points[1].mass, 2.0);
  EXPECT_THROW(build_1d({1, 1, 0}, {1, 1, 0}, 1.0, 1.0, 1.0), BuildError);
}

TEST(LinkLayers, SpringFamiliesAreComplete) {
  const SurfaceMesh in = build_sphere_octa(1, 1.0);
  const SurfaceMesh out = build_sphere_octa(1, 2.0);
  const LayeredBody b = link_layers(in, out);
  const auto n = static_cast<Index>(in.vertices.size());
  EXPECT_EQ(b.radius_springs.size(), in.vertices.size());
  EXPECT_EQ(b.shear_left.size(), in.edges.size());
  EXPECT_EQ(b.shear_right.size(), in.edges.size());
  EXPECT_EQ(b.inner_faces.size(), 32u);
  EXPECT_EQ(b.outer_faces.size(), 32u);

  std::set<std::pair<Index, Index>> radius;
  for (const Spring& s : b.radius_springs) {
    EXPECT_EQ(s.tail, s.head + n);
    EXPECT_NEAR(s.rest_length, 1.0, 1e-12);
    radius.emplace(s.head, s.tail);
  }
  EXPECT_EQ(radius.size(), in.vertices.size());
  for (std::size_t e = 0; e < in.edges.size(); ++e) {
    const auto [a, b2] = in.edges[e];
    EXPECT_EQ(b.shear_left[e].head, a);
    EXPECT_EQ(b.shear_left[e].tail, n + b2);
    EXPECT_EQ(b.shear_right[e].head, b2);
    EXPECT_EQ(b.shear_right[e].tail, n + a);
  }
}

TEST(LinkLayers, FaceEdgesReferenceMatchingSprings) {
  for (const LayeredBody& b : {link_layers(build_sphere_octa(2, 1.0), build_sphere_octa(2, 2.0)),
                               link_layers(build_sphere_polar(8, 6, 1.0), build_sphere_polar(8, 6, 2.0)),
                               build_ring_2d(9, 1.0, 2.0)}) {
    std::size_t diagonals = 0;
    for (const auto* faces : {&b.inner_faces, &b.outer_faces}) {
      for (const Face& f : *faces) {
        for (int k = 0; k < 3; ++k) {
          if (f.edges[k] == kNoEdge) {
            ++diagonals;
            continue;
          }
          const Spring& s = b.spring(f.edges[k]);
          const std::set<Index> ends{s.head, s.tail};
          int touching = 0;
          for (Index v : f.vertices) {
            touching += ends.contains(v) ? 1 : 0;
          }
          EXPECT_EQ(touching, 2);
        }
      }
    }
    if (b.dimension == Dimension::Three && b.inner_points.size() == 8 * 5 + 2) {
      EXPECT_EQ(diagonals, 2u * 2 * 8 * 4);
    }
  }
}

TEST(LinkLayers, RejectsMismatchedOrCoincidentSurfaces) {
  EXPECT_THROW(link_layers(build_sphere_octa(1, 1.0), build_sphere_octa(2, 2.0)), BuildError);
  EXPECT_THROW(link_layers(build_sphere_octa(1, 1.0), build_sphere_octa(1, 1.0)), BuildError);
  EXPECT_THROW(link_layers(build_sphere_polar(6, 5, 1.0), build_sphere_polar(5, 6, 2.0)), BuildError);
}

TEST(LinkLayers, RestVolumesApproachSphereVolume) {
  const LayeredBody b = link_layers(build_sphere_octa(3, 1.0), build_sphere_octa(3, 2.0));
  std::vector<std::array<std::size_t, 3>> tris;
  for (const Face& f : b.outer_faces) {
    tris.push_back({f.vertices[0] - b.outer_offset(), f.vertices[1] - b.outer_offset(), f.vertices[2] - b.outer_offset()});
  }
  const double exact = oracle::face_volume(points_of(b.outer_points), tris);
  EXPECT_NEAR(exact, 4.0 / 3.0 * M_PI * 8.0, 0.05 * 4.0 / 3.0 * M_PI * 8.0);
  EXPECT_GT(b.rest_volume_outer, 0.0);
}

TEST(Valence, OctaBaseHasFourNeighbours) {
  const LayeredBody b = link_layers(build_sphere_octa(0, 1.0), build_sphere_octa(0, 2.0));
  for (std::size_t v : structural_valence(b)) {
    EXPECT_EQ(v, 4u);
  }
  EXPECT_DOUBLE_EQ(spring_force_scale(4), 1.5);
  EXPECT_DOUBLE_EQ(spring_force_scale(6), 1.0);
}

TEST(Coefficients, ApplyRewritesEverySpring) {
  LayeredBody b = build_ring_2d(6, 1.0, 2.0);
  SimConfig cfg;
  cfg.ks = 1.0;
  cfg.kd = 2.0;
  cfg.rks = 3.0;
  cfg.rkd = 4.0;
  cfg.mass = 5.0;
  apply_coefficients(b, cfg);
  for (const Spring& s : b.outer_springs) {
    EXPECT_EQ(s.ks, 1.0);
    EXPECT_EQ(s.kd, 2.0);
  }
  for (const Spring& s : b.shear_right) {
    EXPECT_EQ(s.ks, 3.0);
    EXPECT_EQ(s.kd, 4.0);
  }
  EXPECT_EQ(b.inner_points[3].mass, 5.0);
}

TEST(Translate, MovesEveryParticle) {
  LayeredBody b = build_ring_2d(6, 1.0, 2.0);
  const Vec3 before = b.outer_points[2].position;
  translate(b, {1.0, 2.0, 0.0});
  EXPECT_EQ(b.outer_points[2].position, (before + Vec3{1.0, 2.0, 0.0}));
}
