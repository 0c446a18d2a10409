#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "squish/vec.hpp"

namespace squish {

/// Raised when a tunable is outside its legal range or unknown.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class IntegratorKind { Euler, Midpoint, RK4 };

std::string_view to_string(IntegratorKind kind);
std::optional<IntegratorKind> parse_integrator(std::string_view name);

/// Penalty response coefficients. `restitution` scales the reflected normal
/// velocity, `friction` is the fraction of tangential velocity retained.
struct CollisionParams {
  double restitution = 0.6;
  double friction = 0.9;

  /// Throws ConfigError unless both values lie in [0, 1].
  static CollisionParams make(double restitution, double friction);
};

/// Axis-aligned simulation room. The z extents are ignored for planar bodies.
struct WorldExtents {
  Vec3 min{-10.0, 0.0, -10.0};
  Vec3 max{10.0, 20.0, 10.0};
};

struct SimConfig {
  // Structural springs.
  double ks = 800.0;
  double kd = 15.0;
  // Radius and shear springs.
  double rks = 700.0;
  double rkd = 50.0;
  // Mouse drag spring.
  double mks = 150.0;
  double mkd = 25.0;
  double drag_rest_length = 0.0;

  /// Combined N*R*T of the enclosed gas.
  double pressure_nrt = 20.0;
  double mass = 1.0;
  double gravity = 9.8;
  double dt = 0.003;
  IntegratorKind integrator = IntegratorKind::RK4;
  CollisionParams collision{};
  bool uniformity_correction = false;
  WorldExtents world{};

  double surface_epsilon = 1e-9;
  double layer_epsilon = 1e-3;
  /// Fraction of the construction-time volume below which pressure clamps.
  double volume_floor_fraction = 1e-6;

  void validate() const;
};

/// Applies one named tunable. Throws ConfigError for unknown keys or values
/// out of bounds; `cfg` is left untouched on failure.
void set_param(SimConfig& cfg, std::string_view key, double value);

}  // namespace squish
