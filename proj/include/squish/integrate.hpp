#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "squish/config.hpp"
#include "squish/forces.hpp"
#include "squish/mesh.hpp"
#include "squish/state.hpp"

namespace squish {

/// Stage buffers reused across steps. Stages beyond the method's order stay untouched.
struct StageScratch {
  StateVector y0;
  StateVector k1;
  StateVector k2;
  StateVector k3;
  StateVector k4;
  StateVector trial;
  /// Number of derivative evaluations performed through this scratch.
  std::size_t evaluations = 0;
};

/// Loads `state` into the body, runs the force pass and writes
/// (velocity, force / mass) per particle into `out`.
void derivative(LayeredBody& body, const SimConfig& cfg, const DragState& drag, std::span<const double> state,
                StateVector& out, Diagnostics& diag);
StateVector derivative(LayeredBody& body, const SimConfig& cfg, const DragState& drag, std::span<const double> state,
                       Diagnostics& diag);

// Each step leaves the advanced state in the body and returns false if any
// component became non-finite. Throws std::invalid_argument for h <= 0.
bool step_euler(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, StageScratch& scratch,
                Diagnostics& diag);
bool step_midpoint(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, StageScratch& scratch,
                   Diagnostics& diag);
bool step_rk4(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, StageScratch& scratch,
              Diagnostics& diag);

class Integrator {
 public:
  explicit Integrator(IntegratorKind kind = IntegratorKind::RK4) : kind_(kind) {}

  IntegratorKind kind() const { return kind_; }
  void set_kind(IntegratorKind kind) { kind_ = kind; }

  bool step(LayeredBody& body, const SimConfig& cfg, const DragState& drag, double h, Diagnostics& diag);

  std::size_t derivative_evaluations() const { return scratch_.evaluations; }

 private:
  IntegratorKind kind_;
  StageScratch scratch_;
};

/// Derivative evaluations per step: 1, 2 or 4.
int stages(IntegratorKind kind);

enum class TestSystem { Oscillator, Freefall };

struct AccuracyRow {
  double h = 0.0;
  std::size_t steps = 0;
  double error = 0.0;
};

struct AccuracyResult {
  IntegratorKind kind = IntegratorKind::Euler;
  std::vector<AccuracyRow> rows;
  /// Least-squares slope of log(error) against log(h); NaN when an error is
  /// at round-off level (the method is exact for the system).
  double fitted_order = 0.0;
};

/// Integrates a two-particle test body to `t_final` for each step size and
/// reports the global error against the closed-form solution. The
/// oscillator is a free spring (ks = 8, m = 1, no damping, no gravity); the
/// freefall system is two unlinked particles under g = 9.8.
AccuracyResult order_of_accuracy(TestSystem system, IntegratorKind kind, std::span<const double> h_list,
                                 double t_final = 1.0);

}  // namespace squish
