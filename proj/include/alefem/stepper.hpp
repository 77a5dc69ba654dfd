#pragma once

#include "alefem/ale.hpp"
#include "alefem/assembly.hpp"
#include "alefem/observables.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace alefem {

struct SimConfig {
  PhaseParams params;
  int k = 2;
  double h = 0.04;
  double tau = 0.005;
  double T = 3.0;
  Rect rect;
  Vec2 circle_center{0.5, 0.5};
  double circle_radius = 0.25;
  double remesh_angle = 0.17453;
  bool body_force_weighted_by_rho = true;
  Continuity pressure = Continuity::SubdomainDiscontinuous;
  int vtk_every = 0;

  // Overrides used by verification runs. A force field replaces gravity;
  // boundary data replaces the no-slip condition.
  std::function<Vec2(const Vec2&, double)> force;
  std::function<Vec2(const Vec2&, double)> boundary_velocity;
  std::function<Vec2(const Vec2&)> initial_velocity;
  std::optional<Mesh> initial_mesh;
};

/// Validates ranges; throws Error naming the offending key.
void validate(const SimConfig& config);

/// Number of steps needed to reach T.
int num_steps(const SimConfig& config);

struct State {
  int step = 0;
  double t = 0.0;
  Mesh mesh;
  FESpacePair spaces;
  Vector u, p, w;  // w is always the harmonic extension of u on `mesh`
  MotionState motion;
  std::vector<double> x_origin;  // nodal vector of the flow-map reference mesh
  double multiplier = 0.0;
  double residual = 0.0;
};

struct RemeshEvent {
  int step = 0;
  double t = 0.0;
  double angle_before = 0.0;
  double angle_after = 0.0;
  int nodes_before = 0;
  int nodes_after = 0;
};

State initialize(const SimConfig& config);

/// One linearly semi-implicit Euler step: mesh velocity from the current u,
/// explicit node update, saddle solve on the moved mesh, remesh check.
/// Fills `event` when a remesh happened.
State step(State state, const SimConfig& config, std::optional<RemeshEvent>* event = nullptr);

BenchmarkRecord make_record(const State& state, const SimConfig& config);

struct RunSinks {
  std::function<void(const State&, const BenchmarkRecord&)> on_record;
  std::function<void(const RemeshEvent&)> on_remesh;
};

struct RunResult {
  State final_state;
  std::vector<BenchmarkRecord> records;
  std::vector<RemeshEvent> remesh_events;
};

RunResult run(const SimConfig& config, const RunSinks& sinks = {});

}  // namespace alefem
