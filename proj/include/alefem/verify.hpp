#pragma once

#include "alefem/stepper.hpp"

#include <functional>
#include <string>
#include <vector>

namespace alefem {

/// |v^T (K(x* + e) - K(x*)) u - int_0^1 (shape derivative integral) dtheta|
/// for kind in {M, M_rho, A, A_mu, C}. u and v are velocity vectors, except
/// for C where v is a pressure vector. e is a nodal displacement (size 2M).
/// The theta integral uses n_theta Gauss-Legendre points.
double homotopy_identity_residual(const Mesh& mesh_star, const FESpacePair& spaces, const PhaseParams& params,
                                  const Vector& e, MatrixKind kind, const Vector& u, const Vector& v,
                                  int n_theta = 16);

/// (int_{Omega(x + tau w)} f - int_{Omega(x)} f) / tau - int_{Omega(x)} f div w,
/// with f a scalar field on `space` carried nodally and w a nodal mesh velocity.
double transport_formula_residual(const Mesh& mesh, const ScalarSpace& space, const Vector& f, const Vector& w,
                                  double tau);

/// log(d_coarse / d_fine) / log(m).
double convergence_rate(double d_coarse, double d_fine, double m);

struct RateReport {
  std::string norm;
  std::vector<double> h_values;
  std::vector<double> error_values;
  std::vector<double> rates;
};

/// Rates between consecutive entries of error_values (at least 3 levels).
RateReport make_rate_report(std::string norm, std::vector<double> h, std::vector<double> errors);

/// Exact single-phase Navier-Stokes solution (rho = mu = 1) and its force.
struct ManufacturedSolution {
  std::function<Vec2(const Vec2&, double)> velocity;
  std::function<Mat2(const Vec2&, double)> velocity_gradient;  // row c = grad of component c
  std::function<double(const Vec2&, double)> pressure;
  std::function<Vec2(const Vec2&, double)> force;
};

/// Stream function e^{-t} sin^2(pi x) sin^2(pi y), p = e^{-t} cos(pi x) cos(pi y) on the unit square.
ManufacturedSolution decaying_vortex_solution();
/// Steady u = (x^2, -2xy), p = x - 1/2.
ManufacturedSolution steady_polynomial_solution();

struct ManufacturedErrors {
  double h = 0.0;
  double velocity_l2 = 0.0;
  double velocity_h1 = 0.0;
  double pressure_l2 = 0.0;
};

/// Runs the stepper on a structured n x n mesh of the unit square (no
/// interface, so w = 0) and measures errors at T against the exact fields.
ManufacturedErrors manufactured_flow_errors(const ManufacturedSolution& exact, int k, int n, double tau, double T);

/// Differences of two solutions of the same problem on different meshes,
/// evaluated at the quadrature points of the coarse mesh.
struct LevelDifference {
  double u_h1 = 0.0, w_h1 = 0.0, phi_h1 = 0.0, p_l2 = 0.0;
};
LevelDifference level_difference(const State& coarse, const State& fine);

struct ConvergenceReport {
  std::vector<double> h;
  std::vector<LevelDifference> differences;  // between levels l and l + 1
  RateReport u, w, phi, p;
  std::vector<int> remesh_counts;
};

/// Runs the configuration on `levels` meshes of size h / m^l (nested red
/// refinements when m = 2) up to config.T and estimates spatial rates from
/// differences of consecutive levels.
ConvergenceReport convergence_study(const SimConfig& config, int levels = 3, int m = 2,
                                    const std::function<void(const std::string&)>& log = {});

}  // namespace alefem
