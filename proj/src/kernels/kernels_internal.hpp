#pragma once

#include <cstddef>
#include <span>

#include "squish/kernels.hpp"

// Scalar range helpers shared with the vector variants for loop tails.
namespace squish::kernels::scalar {

std::size_t spring_forces_range(const SpringBatch& batch, std::span<const double> state, int dim,
                                SpringForceOut& out, std::size_t begin, std::size_t end);

void axpy_range(std::span<double> out, std::span<const double> y, double h, std::span<const double> k,
                std::size_t begin);

void midpoint_range(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
                    std::span<const double> k2, double h, std::size_t begin);

void rk4_range(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
               std::span<const double> k2, std::span<const double> k3, std::span<const double> k4, double h,
               std::size_t begin);

}  // namespace squish::kernels::scalar

namespace squish::kernels::avx2 {

// Defined only when the AVX2 translation unit is built.
const KernelTable* table();

}  // namespace squish::kernels::avx2
