#pragma once

#include <span>
#include <vector>

#include "squish/mesh.hpp"

namespace squish {

/// Flat per-particle (position, velocity) pairs in body-wide particle order,
/// `spatial_dim` components each.
using StateVector = std::vector<double>;

std::size_t state_size(const LayeredBody& body);
void pack_state(const LayeredBody& body, StateVector& out);
StateVector pack_state(const LayeredBody& body);
/// Throws std::invalid_argument if the length does not match the body.
void unpack_state(LayeredBody& body, std::span<const double> state);

bool all_finite(std::span<const double> values);

}  // namespace squish
