#include <cmath>

#include "kernels_internal.hpp"

namespace squish::kernels {

void SpringBatch::assign(std::span<const Spring> springs, int dim) {
  const std::size_t n = springs.size();
  head_offset.resize(n);
  tail_offset.resize(n);
  rest.resize(n);
  ks.resize(n);
  kd.resize(n);
  const int stride = 2 * dim;
  for (std::size_t i = 0; i < n; ++i) {
    head_offset[i] = static_cast<std::int32_t>(springs[i].head) * stride;
    tail_offset[i] = static_cast<std::int32_t>(springs[i].tail) * stride;
    rest[i] = springs[i].rest_length;
    ks[i] = springs[i].ks;
    kd[i] = springs[i].kd;
  }
}

void SpringForceOut::resize(std::size_t n) {
  fx.resize(n);
  fy.resize(n);
  fz.resize(n);
}

namespace scalar {

namespace {

template <int Dim>
std::size_t spring_forces_impl(const SpringBatch& b, const double* state, SpringForceOut& out, std::size_t begin,
                               std::size_t end) {
  std::size_t degenerate = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const double* p1 = state + b.head_offset[i];
    const double* p2 = state + b.tail_offset[i];
    const double dx = p2[0] - p1[0];
    const double dy = p2[1] - p1[1];
    const double dz = Dim == 3 ? p2[2] - p1[2] : 0.0;
    double len2 = dx * dx + dy * dy;
    if constexpr (Dim == 3) {
      len2 = len2 + dz * dz;
    }
    const double len = std::sqrt(len2);
    if (len == 0.0) {
      out.fx[i] = 0.0;
      out.fy[i] = 0.0;
      out.fz[i] = 0.0;
      ++degenerate;
      continue;
    }
    const double ux = dx / len;
    const double uy = dy / len;
    const double uz = Dim == 3 ? dz / len : 0.0;
    const double dvx = p2[Dim + 0] - p1[Dim + 0];
    const double dvy = p2[Dim + 1] - p1[Dim + 1];
    double rel = dvx * ux + dvy * uy;
    if constexpr (Dim == 3) {
      const double dvz = p2[Dim + 2] - p1[Dim + 2];
      rel = rel + dvz * uz;
    }
    const double f = (len - b.rest[i]) * b.ks[i] + rel * b.kd[i];
    out.fx[i] = f * ux;
    out.fy[i] = f * uy;
    out.fz[i] = Dim == 3 ? f * uz : 0.0;
  }
  return degenerate;
}

std::size_t spring_forces(const SpringBatch& batch, std::span<const double> state, int dim, SpringForceOut& out) {
  out.resize(batch.size());
  return spring_forces_range(batch, state, dim, out, 0, batch.size());
}

void axpy(std::span<double> out, std::span<const double> y, double h, std::span<const double> k) {
  axpy_range(out, y, h, k, 0);
}

void midpoint(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
              std::span<const double> k2, double h) {
  midpoint_range(out, y0, k1, k2, h, 0);
}

void rk4(std::span<double> out, std::span<const double> y0, std::span<const double> k1, std::span<const double> k2,
         std::span<const double> k3, std::span<const double> k4, double h) {
  rk4_range(out, y0, k1, k2, k3, k4, h, 0);
}

}  // namespace

std::size_t spring_forces_range(const SpringBatch& batch, std::span<const double> state, int dim,
                                SpringForceOut& out, std::size_t begin, std::size_t end) {
  return dim == 3 ? spring_forces_impl<3>(batch, state.data(), out, begin, end)
                  : spring_forces_impl<2>(batch, state.data(), out, begin, end);
}

void axpy_range(std::span<double> out, std::span<const double> y, double h, std::span<const double> k,
                std::size_t begin) {
  for (std::size_t i = begin; i < out.size(); ++i) {
    out[i] = y[i] + h * k[i];
  }
}

void midpoint_range(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
                    std::span<const double> k2, double h, std::size_t begin) {
  for (std::size_t i = begin; i < out.size(); ++i) {
    out[i] = y0[i] + h * ((k1[i] + k2[i]) * 0.5);
  }
}

void rk4_range(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
               std::span<const double> k2, std::span<const double> k3, std::span<const double> k4, double h,
               std::size_t begin) {
  const double sixth = h / 6.0;
  for (std::size_t i = begin; i < out.size(); ++i) {
    const double sum = ((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i];
    out[i] = y0[i] + sixth * sum;
  }
}

}  // namespace scalar

const KernelTable& scalar_table() {
  static const KernelTable table{&scalar::spring_forces, &scalar::axpy, &scalar::midpoint, &scalar::rk4};
  return table;
}

}  // namespace squish::kernels
