#include "squish/state.hpp"

#include <cmath>
#include <stdexcept>

namespace squish {

std::size_t state_size(const LayeredBody& body) {
  return body.particle_count() * 2 * static_cast<std::size_t>(body.spatial_dim());
}

void pack_state(const LayeredBody& body, StateVector& out) {
  const int dim = body.spatial_dim();
  out.resize(state_size(body));
  std::size_t k = 0;
  for (const auto* layer : {&body.inner_points, &body.outer_points}) {
    for (const Particle& p : *layer) {
      out[k++] = p.position.x;
      out[k++] = p.position.y;
      if (dim == 3) {
        out[k++] = p.position.z;
      }
      out[k++] = p.velocity.x;
      out[k++] = p.velocity.y;
      if (dim == 3) {
        out[k++] = p.velocity.z;
      }
    }
  }
}

StateVector pack_state(const LayeredBody& body) {
  StateVector out;
  pack_state(body, out);
  return out;
}

void unpack_state(LayeredBody& body, std::span<const double> state) {
  if (state.size() != state_size(body)) {
    throw std::invalid_argument("state vector length does not match body");
  }
  const int dim = body.spatial_dim();
  std::size_t k = 0;
  for (auto* layer : {&body.inner_points, &body.outer_points}) {
    for (Particle& p : *layer) {
      p.position.x = state[k++];
      p.position.y = state[k++];
      p.position.z = dim == 3 ? state[k++] : 0.0;
      p.velocity.x = state[k++];
      p.velocity.y = state[k++];
      p.velocity.z = dim == 3 ? state[k++] : 0.0;
    }
  }
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      return false;
    }
  }
  return true;
}

}  // namespace squish
