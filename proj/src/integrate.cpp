#include "squish/integrate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "squish/kernels.hpp"

namespace squish {

void derivative(LayeredBody& body, const SimConfig& cfg, const DragState& drag, std::span<const double> state,
                StateVector& out, Diagnostics& diag) {
  unpack_state(body, state);
  accumulate_forces(body, cfg, drag, diag);
  const int dim = body.spatial_dim();
  out.resize(state.size());
  std::size_t k = 0;
  for (auto* layer : {&body.inner_points, &body.outer_points}) {
    for (Particle& p : *layer) {
      p.d_position = p.velocity;
      p.d_velocity = p.force / p.mass;
      out[k++] = p.d_position.x;
      out[k++] = p.d_position.y;
      if (dim == 3) {
        out[k++] = p.d_position.z;
      }
      out[k++] = p.d_velocity.x;
      out[k++] = p.d_velocity.y;
      if (dim == 3) {
        out[k++] = p.d_velocity.z;
      }
    }
  }
}

StateVector derivative(LayeredBody& body, const SimConfig& cfg, const DragState& drag, std::span<const double> state,
                       Diagnostics& diag) {
  StateVector out;
  derivative(body, cfg, drag, state, out, diag);
  return out;
}

namespace {

void require_positive(double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("time step must be positive");
  }
}

void eval(LayeredBody& body, const SimConfig& cfg, const DragState& drag, std::span<const double> state,
          StateVector& out, StageScratch& scratch, Diagnostics& diag) {
  derivative(body, cfg, drag, state, out, diag);
  ++scratch.evaluations;
}

bool finish(LayeredBody& body, const StateVector& y) {
  unpack_state(body, y);
  return all_finite(y);
}

}  // namespace

bool step_euler(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, StageScratch& scratch,
                Diagnostics& diag) {
  require_positive(h);
  const auto& k = kernels::active();
  pack_state(body, scratch.y0);
  eval(body, cfg, drag, scratch.y0, scratch.k1, scratch, diag);
  scratch.trial.resize(scratch.y0.size());
  k.axpy(scratch.trial, scratch.y0, h, scratch.k1);
  return finish(body, scratch.trial);
}

bool step_midpoint(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, StageScratch& scratch,
                   Diagnostics& diag) {
  require_positive(h);
  const auto& k = kernels::active();
  pack_state(body, scratch.y0);
  scratch.trial.resize(scratch.y0.size());
  eval(body, cfg, drag, scratch.y0, scratch.k1, scratch, diag);
  k.axpy(scratch.trial, scratch.y0, h, scratch.k1);
  eval(body, cfg, drag, scratch.trial, scratch.k2, scratch, diag);
  k.midpoint_combine(scratch.trial, scratch.y0, scratch.k1, scratch.k2, h);
  return finish(body, scratch.trial);
}

bool step_rk4(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, StageScratch& scratch,
              Diagnostics& diag) {
  require_positive(h);
  const auto& k = kernels::active();
  const double half = 0.5 * h;
  pack_state(body, scratch.y0);
  scratch.trial.resize(scratch.y0.size());
  eval(body, cfg, drag, scratch.y0, scratch.k1, scratch, diag);
  k.axpy(scratch.trial, scratch.y0, half, scratch.k1);
  eval(body, cfg, drag, scratch.trial, scratch.k2, scratch, diag);
  k.axpy(scratch.trial, scratch.y0, half, scratch.k2);
  eval(body, cfg, drag, scratch.trial, scratch.k3, scratch, diag);
  k.axpy(scratch.trial, scratch.y0, h, scratch.k3);
  eval(body, cfg, drag, scratch.trial, scratch.k4, scratch, diag);
  k.rk4_combine(scratch.trial, scratch.y0, scratch.k1, scratch.k2, scratch.k3, scratch.k4, h);
  return finish(body, scratch.trial);
}

bool Integrator::step(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, Diagnostics& diag) {
  switch (kind_) {
    case IntegratorKind::Euler:
      return step_euler(body, cfg, drag, h, scratch_, diag);
    case IntegratorKind::Midpoint:
      return step_midpoint(body, cfg, drag, h, scratch_, diag);
    case IntegratorKind::RK4:
      return step_rk4(body, cfg, drag, h, scratch_, diag);
  }
  throw std::logic_error("unknown integrator");
}

int stages(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::Euler:
      return 1;
    case IntegratorKind::Midpoint:
      return 2;
    case IntegratorKind::RK4:
      return 4;
  }
  return 0;
}

namespace {

constexpr double kOscillatorKs = 8.0;
constexpr double kOscillatorRest = 1.0;
constexpr double kOscillatorAmplitude = 0.1;
constexpr double kFreefallG = 9.8;
constexpr double kFreefallHeight = 10.0;

SimConfig test_config(TestSystem system) {
  SimConfig cfg;
  cfg.pressure_nrt = 0.0;
  cfg.gravity = system == TestSystem::Freefall ? kFreefallG : 0.0;
  return cfg;
}

LayeredBody test_body(TestSystem system) {
  if (system == TestSystem::Oscillator) {
    // Built stretched, then given its true rest length.
    LayeredBody body =
        build_1d({0.0, 0.0, 0.0}, {kOscillatorRest + kOscillatorAmplitude, 0.0, 0.0}, 1.0, kOscillatorKs, 0.0);
    body.outer_springs[0].rest_length = kOscillatorRest;
    return body;
  }
  LayeredBody body = build_1d({0.0, kFreefallHeight, 0.0}, {1.0, kFreefallHeight, 0.0}, 1.0, 0.0, 0.0);
  return body;
}

// Global error at time t: separation/height error plus velocity error scaled
// to the same units.
double global_error(TestSystem system, const LayeredBody& body, double t) {
  const Particle& a = body.outer_points[0];
  const Particle& b = body.outer_points[1];
  if (system == TestSystem::Oscillator) {
    // Reduced mass m/2 gives omega = sqrt(2 ks / m).
    const double omega = std::sqrt(2.0 * kOscillatorKs / 1.0);
    const double sep = kOscillatorRest + kOscillatorAmplitude * std::cos(omega * t);
    const double sep_rate = -kOscillatorAmplitude * omega * std::sin(omega * t);
    const double e_pos = std::abs((b.position.x - a.position.x) - sep);
    const double e_vel = std::abs((b.velocity.x - a.velocity.x) - sep_rate) / omega;
    return std::max(e_pos, e_vel);
  }
  const double y = kFreefallHeight - 0.5 * kFreefallG * t * t;
  const double v = -kFreefallG * t;
  return std::max(std::abs(a.position.y - y), std::abs(a.velocity.y - v));
}

}  // namespace

AccuracyResult order_of_accuracy(TestSystem system, IntegratorKind kind, std::span<const double> h_list,
                                 double t_final) {
  AccuracyResult result;
  result.kind = kind;
  const SimConfig cfg = test_config(system);
  const DragState no_drag{};
  bool exact = false;
  for (double h : h_list) {
    require_positive(h);
    LayeredBody body = test_body(system);
    Integrator integrator(kind);
    Diagnostics diag;
    const auto steps = static_cast<std::size_t>(std::llround(t_final / h));
    for (std::size_t i = 0; i < steps; ++i) {
      integrator.step(body, cfg, no_drag, h, diag);
    }
    const double t = static_cast<double>(steps) * h;
    const double err = global_error(system, body, t);
    result.rows.push_back({h, steps, err});
    exact = exact || err < 1e-12;
  }
  if (exact || result.rows.size() < 2) {
    result.fitted_order = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& row : result.rows) {
    const double x = std::log(row.h);
    const double y = std::log(row.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto n = static_cast<double>(result.rows.size());
  result.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return result;
}

}  // namespace squish
