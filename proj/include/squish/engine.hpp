#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "squish/collide.hpp"
#include "squish/config.hpp"
#include "squish/forces.hpp"
#include "squish/integrate.hpp"
#include "squish/mesh.hpp"

namespace squish {

enum class BodyKind { OneD, Ring2D, SpherePolar, SphereOcta };

std::string_view to_string(BodyKind kind);
std::optional<BodyKind> parse_body_kind(std::string_view name);

/// Builder parameters for one of the procedural bodies. Each builder reads
/// only the fields it needs.
struct BodySpec {
  BodyKind kind = BodyKind::Ring2D;
  Vec3 p0{0.0, 6.0, 0.0};
  Vec3 p1{0.0, 5.0, 0.0};
  std::size_t n = 12;
  std::size_t slices = 10;
  std::size_t stacks = 10;
  std::size_t iterations = 1;
  double r_inner = 1.5;
  double r_outer = 2.0;
  /// Translation applied to ring and sphere bodies.
  Vec3 center{0.0, 5.0, 0.0};
};

LayeredBody build_body(const BodySpec& spec, const SimConfig& cfg);

struct Metrics {
  double volume_inner = 0.0;
  double volume_outer = 0.0;
  double kinetic_energy = 0.0;
  /// Elastic energy stored in all springs.
  double potential_energy = 0.0;
  double max_norm = 0.0;
  std::size_t collisions = 0;
};

struct ParticleState {
  double mass = 0.0;
  Vec3 position{};
  Vec3 velocity{};
};

struct Snapshot {
  std::uint64_t step = 0;
  double time = 0.0;
  int spatial_dim = 2;
  std::vector<ParticleState> particles;
  Metrics metrics;
  DragState drag;
  bool diverged = false;
};

Metrics compute_metrics(const LayeredBody& body);

/// One body advancing under one configuration. Drag and parameter changes
/// take effect at the next step boundary.
class Simulation {
 public:
  Simulation(LayeredBody body, SimConfig cfg);

  /// accumulate -> integrate -> world collision -> inner containment ->
  /// metrics. Once diverged, further calls return the final snapshot unchanged.
  const Snapshot& step();
  const Snapshot& snapshot() const { return snapshot_; }

  void drag_start(const Vec3& anchor);
  void drag_move(const Vec3& anchor);
  void drag_end();
  /// Throws ConfigError and leaves the simulation unchanged on bad input.
  void set_param(std::string_view key, double value);
  void set_integrator(IntegratorKind kind);

  bool diverged() const { return snapshot_.diverged; }
  std::uint64_t step_index() const { return snapshot_.step; }
  double time() const { return snapshot_.time; }
  const LayeredBody& body() const { return body_; }
  const SimConfig& config() const { return cfg_; }
  const DragState& drag() const { return drag_; }
  const Diagnostics& diagnostics() const { return diag_; }
  std::size_t derivative_evaluations() const { return integrator_.derivative_evaluations(); }
  double divergence_bound() const { return divergence_bound_; }

 private:
  void refresh_snapshot(std::size_t collisions);

  LayeredBody body_;
  SimConfig cfg_;
  WorldBox world_;
  Integrator integrator_;
  DragState drag_;
  std::uint64_t last_drag_move_step_ = 0;
  bool drag_velocity_pending_ = false;
  Diagnostics diag_;
  double divergence_bound_ = 0.0;
  Snapshot snapshot_;
};

struct ScenarioEvent {
  enum class Type { DragStart, DragMove, DragEnd, SetParam };
  std::uint64_t step = 0;
  Type type = Type::DragEnd;
  Vec3 anchor{};
  std::string key;
  double value = 0.0;
};

struct ScenarioScript {
  BodySpec body;
  SimConfig config;
  std::vector<ScenarioEvent> events;
  std::uint64_t steps = 0;
  std::uint64_t snapshot_every = 1;
};

/// Raised for scripts that fail validation; nothing has run yet.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const ScenarioScript& script);

struct RunResult {
  Snapshot final_snapshot;
  std::size_t emitted = 0;
  bool diverged = false;
};

/// Replays the script deterministically. Emits the initial snapshot, every
/// `snapshot_every`-th step, and the last step (or the diverged one).
RunResult run(const ScenarioScript& script, const std::function<void(const Snapshot&)>& emit);

struct SweepCell {
  double dt = 0.0;
  IntegratorKind integrator = IntegratorKind::Euler;
  bool survived = false;
  std::optional<std::uint64_t> steps_to_divergence;
};

/// Runs every (dt, integrator) pair from identical initial conditions.
std::vector<SweepCell> stability_sweep(const BodySpec& body, const SimConfig& base, std::span<const double> dts,
                                       std::span<const IntegratorKind> integrators, std::uint64_t steps);

}  // namespace squish
