#include "squish/config.hpp"

#include <cmath>
#include <string>

namespace squish {

std::string_view to_string(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::Euler:
      return "euler";
    case IntegratorKind::Midpoint:
      return "midpoint";
    case IntegratorKind::RK4:
      return "rk4";
  }
  return "unknown";
}

std::optional<IntegratorKind> parse_integrator(std::string_view name) {
  if (name == "euler") {
    return IntegratorKind::Euler;
  }
  if (name == "midpoint") {
    return IntegratorKind::Midpoint;
  }
  if (name == "rk4") {
    return IntegratorKind::RK4;
  }
  return std::nullopt;
}

CollisionParams CollisionParams::make(double restitution, double friction) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(restitution) || !unit(friction)) {
    throw ConfigError("restitution and friction must lie in [0, 1]");
  }
  return {restitution, friction};
}

namespace {

void require(bool ok, std::string_view what) {
  if (!ok) {
    throw ConfigError(std::string{what});
  }
}

bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void SimConfig::validate() const {
  require(non_negative(ks) && non_negative(kd) && non_negative(rks) && non_negative(rkd) && non_negative(mks) &&
              non_negative(mkd),
          "stiffness and damping must be finite and >= 0");
  require(non_negative(pressure_nrt), "pressure must be finite and >= 0");
  require(non_negative(drag_rest_length), "drag rest length must be >= 0");
  require(std::isfinite(mass) && mass > 0.0, "mass must be > 0");
  require(std::isfinite(gravity), "gravity must be finite");
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  CollisionParams::make(collision.restitution, collision.friction);
  require(non_negative(surface_epsilon) && non_negative(layer_epsilon) && layer_epsilon < 1.0,
          "epsilons must be >= 0 (layer epsilon < 1)");
  require(non_negative(volume_floor_fraction), "volume floor fraction must be >= 0");
}

void set_param(SimConfig& cfg, std::string_view key, double value) {
  SimConfig next = cfg;
  if (key == "ks") {
    next.ks = value;
  } else if (key == "kd") {
    next.kd = value;
  } else if (key == "rks") {
    next.rks = value;
  } else if (key == "rkd") {
    next.rkd = value;
  } else if (key == "mks") {
    next.mks = value;
  } else if (key == "mkd") {
    next.mkd = value;
  } else if (key == "pressure") {
    next.pressure_nrt = value;
  } else if (key == "mass") {
    next.mass = value;
  } else if (key == "g") {
    next.gravity = value;
  } else if (key == "dt") {
    next.dt = value;
  } else if (key == "e") {
    next.collision.restitution = value;
  } else if (key == "f") {
    next.collision.friction = value;
  } else if (key == "uniformity_correction") {
    require(value == 0.0 || value == 1.0, "uniformity_correction must be 0 or 1");
    next.uniformity_correction = value != 0.0;
  } else {
    throw ConfigError("unknown parameter: " + std::string{key});
  }
  next.validate();
  cfg = next;
}

}  // namespace squish
