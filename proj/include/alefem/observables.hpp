#pragma once

#include "alefem/assembly.hpp"

#include <span>

namespace alefem {

struct BenchmarkRecord {
  double t = 0.0;
  double circularity = 0.0;
  Vec2 center_of_mass = Vec2::Zero();
  double rise_velocity = 0.0;
  double kinetic_energy = 0.0;
  double potential_energy = 0.0;
  double total_energy = 0.0;
  double area_minus = 0.0;
  double interface_length = 0.0;
  double min_angle = 0.0;
  int remesh_count = 0;
};

/// Centroid of the minus phase.
Vec2 center_of_mass(const Mesh& mesh);
/// Length of the (curved) interface.
double interface_length(const Mesh& mesh);
/// 2 sqrt(pi |Omega_minus|) / |Gamma|.
double circularity(const Mesh& mesh);
/// Mean vertical velocity over the minus phase.
double rise_velocity(const Mesh& mesh, const ScalarSpace& velocity, const Vector& u);

struct Energy {
  double kinetic = 0.0, potential = 0.0, total = 0.0;
};
/// Kinetic sum rho |u|^2 / 2 and potential sum rho g y over both phases.
Energy energy(const Mesh& mesh, const ScalarSpace& velocity, const Vector& u, const PhaseParams& params);

}  // namespace alefem
