#pragma once

#include "alefem/fespace.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <span>

namespace alefem {

struct PhaseParams {
  double rho_plus = 1.0, rho_minus = 1.0;
  double mu_plus = 1.0, mu_minus = 1.0;
  double g = 0.0;

  double rho(Phase p) const { return p == Phase::Plus ? rho_plus : rho_minus; }
  double mu(Phase p) const { return p == Phase::Plus ? mu_plus : mu_minus; }
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// M, A: unweighted mass and vector Laplacian; M_rho, A_mu: phase-weighted
/// mass and 2 mu D(u):D(v); C: (div v) q with pressure rows.
enum class MatrixKind { M, M_rho, A, A_mu, C };
const char* to_string(MatrixKind kind);

/// Velocity-space matrices are 2N x 2N in the interleaved layout; C is
/// (pressure DOFs) x 2N.
SparseMatrix assemble(MatrixKind kind, const Mesh& mesh, const FESpacePair& spaces,
                      const PhaseParams& params = {});

/// Scalar mass (kind M) or Laplacian (kind A) on any scalar space.
SparseMatrix assemble_scalar(MatrixKind kind, const Mesh& mesh, const ScalarSpace& space);

/// v^T B chi = sum_K rho_K int (a . grad chi) . v, with `a` interleaved
/// velocity coefficients.
SparseMatrix assemble_convection(const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params,
                                 const Vector& a);

/// int w f . v with f = (0, -g); w = rho when weighted_by_rho, else 1.
Vector assemble_load(const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params,
                     bool weighted_by_rho);
/// Same with a general force field evaluated at quadrature points.
Vector assemble_load(const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params,
                     bool weighted_by_rho, const std::function<Vec2(const Vec2&)>& f);

/// m with m^T p = integral of the pressure field.
Vector mean_vector(const Mesh& mesh, const ScalarSpace& space);

enum class NormKind { M, A, K };
/// v^T M v, v^T A v or v^T (M + A) v for a scalar (size N) or interleaved
/// vector (size 2N) coefficient vector.
double quadratic_norm(std::span<const double> v, NormKind kind, const Mesh& mesh, const ScalarSpace& space);

/// Test hook: scales every mass-matrix contribution by (1 + eps). Zero disables.
void set_mass_fault(double eps);
double mass_fault();

}  // namespace alefem
