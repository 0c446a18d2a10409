#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "squish/engine.hpp"
#include "squish/forces.hpp"

using namespace squish;

namespace {

SimConfig quiet_config() {
  SimConfig cfg;
  cfg.gravity = 0.0;
  cfg.pressure_nrt = 0.0;
  return cfg;
}

void jitter(LayeredBody& b, std::mt19937_64& rng, double amount) {
  std::uniform_real_distribution<double> u(-amount, amount);
  for (auto* layer : {&b.inner_points, &b.outer_points}) {
    for (Particle& p : *layer) {
      p.position += Vec3{u(rng), u(rng), b.dimension == Dimension::Three ? u(rng) : 0.0};
      p.velocity = Vec3{u(rng), u(rng), b.dimension == Dimension::Three ? u(rng) : 0.0};
    }
  }
}

// Replaces the outer layer of a ring body with an arbitrary polygon.
LayeredBody ring_with_outer(const std::vector<oracle::P3>& poly) {
  LayeredBody b = build_ring_2d(poly.size(), 0.5, 1.0);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    b.outer_points[i].position = {poly[i].x, poly[i].y, 0.0};
  }
  return b;
}

std::vector<oracle::P3> random_star_polygon(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(3, 40);
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  const int n = count(rng);
  std::vector<double> angles(n);
  for (double& a : angles) {
    a = angle(rng);
  }
  std::sort(angles.begin(), angles.end());
  const double cx = shift(rng);
  const double cy = shift(rng);
  const bool clockwise = rng() % 2 == 0;
  std::vector<oracle::P3> poly;
  for (int i = 0; i < n; ++i) {
    const double a = clockwise ? -angles[i] : angles[i];
    const double r = radius(rng);
    poly.push_back({cx + r * std::cos(a), cy + r * std::sin(a), 0.0});
  }
  return poly;
}

}  // namespace

TEST(Gravity, PointsDownScaledByMass) {
  Particle p;
  p.mass = 3.0;
  EXPECT_EQ(gravity_force(p, 9.8), (Vec3{0.0, -29.400000000000002, 0.0}));
}

TEST(Hooke, StretchedSpringPullsEndsTogether) {
  Spring s;
  s.rest_length = 1.0;
  s.ks = 10.0;
  const ForcePair f = hooke_force(s, {0, 0, 0}, {2, 0, 0});
  EXPECT_DOUBLE_EQ(f.on_head.x, 10.0);
  EXPECT_DOUBLE_EQ(f.on_tail.x, -10.0);
  const ForcePair g = hooke_force(s, {0, 0, 0}, {0.5, 0, 0});
  EXPECT_DOUBLE_EQ(g.on_head.x, -5.0);
}

TEST(Hooke, ZeroLengthIsDegenerateNotNaN) {
  Spring s;
  s.rest_length = 1.0;
  s.ks = 10.0;
  Diagnostics d;
  const ForcePair f = hooke_force(s, {1, 1, 1}, {1, 1, 1}, &d);
  EXPECT_EQ(f.on_head, Vec3{});
  EXPECT_EQ(d.degenerate_springs, 1u);
  damping_force(s, {1, 1, 1}, {1, 1, 1}, {}, {1, 0, 0}, &d);
  EXPECT_EQ(d.degenerate_springs, 2u);
}

TEST(Damping, OpposesRelativeMotionAlongAxis) {
  Spring s;
  s.kd = 2.0;
  // Separating ends: head is pulled toward the tail.
  const ForcePair f = damping_force(s, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}, {3, 5, 0});
  EXPECT_DOUBLE_EQ(f.on_head.x, 6.0);
  EXPECT_DOUBLE_EQ(f.on_tail.x, -6.0);
  EXPECT_EQ(f.on_head.y, 0.0);
}

TEST(ActionReaction, EveryPairSumsToZeroExactly) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    LayeredBody b = trial % 2 == 0 ? build_ring_2d(5 + trial, 1.0, 2.0)
                                   : link_layers(build_sphere_octa(1, 1.0), build_sphere_octa(1, 2.0));
    jitter(b, rng, 0.3);
    b.for_each_container([&](const std::vector<Spring>& springs) {
      for (const Spring& s : springs) {
        const ForcePair h = hooke_force(s, b);
        const ForcePair d = damping_force(s, b);
        EXPECT_EQ(h.on_head + h.on_tail, Vec3{});
        EXPECT_EQ(d.on_head + d.on_tail, Vec3{});
      }
    });
  }
}

TEST(ActionReaction, SpringPassHasNoNetForce) {
  std::mt19937_64 rng(11);
  LayeredBody b = link_layers(build_sphere_octa(2, 1.0), build_sphere_octa(2, 2.0));
  jitter(b, rng, 0.2);
  Diagnostics d;
  accumulate_forces(b, quiet_config(), DragState{}, d);
  Vec3 net{};
  double scale = 0.0;
  for (const auto* layer : {&b.inner_points, &b.outer_points}) {
    for (const Particle& p : *layer) {
      net += p.force;
      scale = std::max(scale, norm(p.force));
    }
  }
  EXPECT_LE(norm(net), 1e-12 * scale * static_cast<double>(b.particle_count()));
}

TEST(SpringPass, MatchesPerSpringReference) {
  std::mt19937_64 rng(3);
  LayeredBody b = build_ring_2d(10, 1.0, 2.0);
  jitter(b, rng, 0.2);
  std::vector<Vec3> expected(b.particle_count());
  b.for_each_container([&](const std::vector<Spring>& springs) {
    for (const Spring& s : springs) {
      const ForcePair h = hooke_force(s, b);
      const ForcePair d = damping_force(s, b);
      expected[s.head] += h.on_head + d.on_head;
      expected[s.tail] += h.on_tail + d.on_tail;
    }
  });
  Diagnostics diag;
  accumulate_forces(b, quiet_config(), DragState{}, diag);
  for (Index i = 0; i < b.particle_count(); ++i) {
    EXPECT_NEAR(b.particle(i).force.x, expected[i].x, 1e-9);
    EXPECT_NEAR(b.particle(i).force.y, expected[i].y, 1e-9);
  }
}

TEST(Normals, PerpendicularWithSpringLength) {
  const Vec3 a{1, 2, 3};
  const Vec3 b{4, -1, 5};
  const Vec3 n2 = spring_normal_2d({1, 2, 0}, {4, -1, 0});
  EXPECT_EQ(dot(n2, Vec3{3, -3, 0}), 0.0);
  EXPECT_DOUBLE_EQ(norm(n2), norm(Vec3{3, -3, 0}));
  const Vec3 n3 = spring_normal_3d(a, b);
  EXPECT_DOUBLE_EQ(norm(n3), norm(b - a));
  EXPECT_EQ(n3, (Vec3{2, -3, -3}));
}

TEST(Volume, MatchesShoelaceOnRandomRings) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto poly = random_star_polygon(rng);
    const double expected = std::abs(oracle::shoelace(poly));
    const double got = volume_gauss(ring_with_outer(poly), Layer::Outer);
    EXPECT_LE(std::abs(got - expected), 1e-9 * expected) << "ring " << i;
  }
}

TEST(Volume, RegularPolygonApproachesCircle) {
  const LayeredBody b = build_ring_2d(64, 0.5, 1.0);
  EXPECT_LE(std::abs(volume_gauss(b, Layer::Outer) - M_PI), 0.005 * M_PI);
}

TEST(Volume, InvariantUnderTranslationIn2D) {
  LayeredBody b = build_ring_2d(12, 1.0, 2.0);
  const double before = volume_gauss(b, Layer::Outer);
  translate(b, {7.0, -3.0, 0.0});
  EXPECT_NEAR(volume_gauss(b, Layer::Outer), before, 1e-12 * before);
}

TEST(Volume, OneDimensionalBodyHasNoVolume) {
  const LayeredBody b = build_1d({0, 0, 0}, {1, 0, 0}, 1.0, 1.0, 1.0);
  EXPECT_THROW(volume_gauss(b, Layer::Outer), std::invalid_argument);
}

TEST(Pressure, PushesEveryOuterParticleOutward) {
  for (LayeredBody b : {build_ring_2d(12, 1.0, 2.0), link_layers(build_sphere_octa(2, 1.0), build_sphere_octa(2, 2.0))}) {
    SimConfig cfg = quiet_config();
    cfg.ks = cfg.kd = cfg.rks = cfg.rkd = 0.0;
    apply_coefficients(b, cfg);
    cfg.pressure_nrt = 20.0;
    Diagnostics d;
    accumulate_forces(b, cfg, DragState{}, d);
    const Vec3 c = layer_centroid(b, Layer::Outer);
    for (const Particle& p : b.outer_points) {
      EXPECT_GT(dot(p.force, p.position - c), 0.0);
    }
    EXPECT_EQ(d.volume_clamps, 0u);
  }
}

TEST(Pressure, ClockwiseRingStillPushesOutward) {
  LayeredBody b = build_ring_2d(8, 1.0, 2.0);
  for (auto* layer : {&b.inner_points, &b.outer_points}) {
    for (Particle& p : *layer) {
      p.position.y = -p.position.y;
    }
  }
  Diagnostics d;
  pressure_forces(b, PressureParams{20.0, true}, 1e-6, d);
  for (const Particle& p : b.outer_points) {
    EXPECT_GT(dot(p.force, p.position), 0.0);
  }
}

TEST(Pressure, CollapsedLayerIsClampedAndReported) {
  LayeredBody b = build_ring_2d(6, 1.0, 2.0);
  for (Particle& p : b.inner_points) {
    p.position = {0.0, 0.0, 0.0};
  }
  Diagnostics d;
  pressure_forces(b, PressureParams{20.0, true}, 1e-6, d);
  EXPECT_EQ(d.volume_clamps, 1u);
  for (const Particle& p : b.inner_points) {
    EXPECT_TRUE(is_finite(p.force));
  }
}

TEST(Drag, PullsTargetTowardAnchor) {
  LayeredBody b = build_ring_2d(12, 1.0, 2.0);
  DragState drag;
  drag.anchor = {5.0, 0.0, 0.0};
  drag.target = find_closest_point(b, drag.anchor);
  EXPECT_EQ(drag.target, 0u);
  EXPECT_EQ(drag_force(drag, b), Vec3{});
  drag.active = true;
  const Vec3 f = drag_force(drag, b);
  EXPECT_DOUBLE_EQ(f.x, 3.0 * drag.ks_m);
  EXPECT_EQ(f.y, 0.0);

  SimConfig cfg = quiet_config();
  Diagnostics d;
  accumulate_forces(b, cfg, drag, d);
  EXPECT_GT(b.outer_points[0].force.x, 0.0);
}

TEST(Drag, ClosestPointPrefersLowestIndexOnTies) {
  const LayeredBody b = build_ring_2d(4, 1.0, 2.0);
  EXPECT_EQ(find_closest_point(b, {0.0, 0.0, 0.0}), 0u);
  EXPECT_EQ(find_closest_point(b, {0.0, 3.0, 0.0}), 1u);
}

TEST(UniformityCorrection, ScalesStructuralForcesBySixOverValence) {
  std::mt19937_64 rng(5);
  LayeredBody b = link_layers(build_sphere_octa(0, 1.0), build_sphere_octa(0, 2.0));
  jitter(b, rng, 0.1);
  SimConfig cfg = quiet_config();
  cfg.rks = cfg.rkd = 0.0;
  apply_coefficients(b, cfg);
  LayeredBody corrected = b;
  Diagnostics d;
  accumulate_forces(b, cfg, DragState{}, d);
  cfg.uniformity_correction = true;
  accumulate_forces(corrected, cfg, DragState{}, d);
  for (Index i = 0; i < b.particle_count(); ++i) {
    const Vec3 expected = b.particle(i).force * 1.5;
    EXPECT_NEAR(corrected.particle(i).force.x, expected.x, 1e-12);
    EXPECT_NEAR(corrected.particle(i).force.z, expected.z, 1e-12);
  }
}
