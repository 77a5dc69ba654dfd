#pragma once

#include "alefem/fespace.hpp"
#include "alefem/mesh_generation.hpp"

#include <span>
#include <vector>

namespace alefem {

struct MotionState {
  int remesh_count = 0;
  double last_min_angle = 0.0;
};

/// Discrete harmonic extension: w = u on interface DOFs, w = 0 on the outer
/// boundary, and (grad w, grad chi) = 0 for all other scalar test functions,
/// componentwise. Dirichlet entries are copied bitwise.
Vector harmonic_extension(const Mesh& mesh, const FESpacePair& spaces, const Vector& u);

/// x + tau * w over the nodal part of w.
std::vector<double> advance_mesh(std::span<const double> x, std::span<const double> w, double tau);

/// Interpolates a field given on (old_mesh, old_space) into new_space by
/// point evaluation at the new DOF positions, taking values from the side of
/// the new DOF's phase. components is 1 (scalar) or 2 (interleaved vector).
Vector transfer_field(const ScalarSpace& old_space, const PointLocator& locator,
                      const Vector& coeffs, int components, const Mesh& new_mesh,
                      const ScalarSpace& new_space);

struct RemeshOptions {
  double angle_threshold = 0.17453292519943295;  // pi / 18
  Rect rect;
  double h = 0.04;
  Continuity pressure = Continuity::SubdomainDiscontinuous;
};

struct RemeshResult {
  Mesh mesh;
  FESpacePair spaces;
  Vector u, p;
  bool did_remesh = false;
  double min_angle_before = 0.0;
  double min_angle = 0.0;  // of the returned mesh
};

/// Keeps everything when the minimum angle exceeds the threshold, otherwise
/// re-triangulates the current geometry (interface nodes kept verbatim) and
/// transfers u and p. Throws GeometryError when the new mesh fails the bound.
RemeshResult check_and_remesh(const Mesh& mesh, const FESpacePair& spaces, const Vector& u, const Vector& p,
                              const RemeshOptions& opt);

}  // namespace alefem
