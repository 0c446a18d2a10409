#pragma once

// Data-parallel inner loops of the force pass and the integrators.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active variant is chosen once at startup from the CPU feature
// bits (override with SQUISH_KERNELS=scalar|avx2). Both variants perform the
// same IEEE operations in the same order and never contract to FMA, so they
// produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "squish/mesh.hpp"

namespace squish::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Struct-of-arrays copy of a spring container, addressed into a packed
/// state vector (per particle: position then velocity, `dim` each).
struct SpringBatch {
  std::vector<std::int32_t> head_offset;
  std::vector<std::int32_t> tail_offset;
  std::vector<double> rest;
  std::vector<double> ks;
  std::vector<double> kd;

  void assign(std::span<const Spring> springs, int dim);
  std::size_t size() const { return rest.size(); }
};

/// Per-spring force acting on the head particle; the tail receives the negation.
struct SpringForceOut {
  std::vector<double> fx;
  std::vector<double> fy;
  std::vector<double> fz;

  void resize(std::size_t n);
};

struct KernelTable {
  /// Hooke plus damping along the spring axis. Zero-length springs produce
  /// zero force; the return value counts them.
  std::size_t (*spring_forces)(const SpringBatch& batch, std::span<const double> state, int dim,
                               SpringForceOut& out);
  /// out = y + h * k
  void (*axpy)(std::span<double> out, std::span<const double> y, double h, std::span<const double> k);
  /// out = y0 + h * ((k1 + k2) * 0.5)
  void (*midpoint_combine)(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
                           std::span<const double> k2, double h);
  /// out = y0 + (h / 6) * (((k1 + 2 k2) + 2 k3) + k4)
  void (*rk4_combine)(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
                      std::span<const double> k2, std::span<const double> k3, std::span<const double> k4, double h);
};

const KernelTable& scalar_table();
/// Only valid when isa_supported(Isa::Avx2).
const KernelTable& avx2_table();

bool isa_supported(Isa isa);
Isa active_isa();
/// Switches the process-wide table. Throws std::invalid_argument if the CPU
/// lacks the instruction set.
void set_active_isa(Isa isa);
const KernelTable& active();

}  // namespace squish::kernels
