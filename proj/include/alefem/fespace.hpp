#pragma once

#include "alefem/mesh.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace alefem {

enum class Continuity { Global, SubdomainDiscontinuous };

/// Scalar Lagrange space on the element maps of a mesh. Only the DOF map is
/// stored, so a space built on a mesh stays valid for all of its displaced
/// copies (same connectivity).
class ScalarSpace {
 public:
  ScalarSpace() = default;

  /// Degree-d isoparametric Lagrange space, 1 <= d <= mesh degree.
  static ScalarSpace lagrange(const Mesh& mesh, int degree, Continuity continuity = Continuity::Global);
  /// P1 plus one cubic bubble per element (mesh of degree 1).
  static ScalarSpace mini(const Mesh& mesh);

  const ReferenceElement& reference() const { return *ref_; }
  int degree() const { return ref_->degree(); }
  Continuity continuity() const { return continuity_; }
  int num_dofs() const { return n_dofs_; }
  int dofs_per_element() const { return npe_; }
  int num_elements() const { return static_cast<int>(dofs_.size() / npe_); }
  std::span<const int> dofs(int e) const {
    return {dofs_.data() + static_cast<std::size_t>(e) * npe_, static_cast<std::size_t>(npe_)};
  }
  /// One (element, local index) owning each DOF.
  int owner_element(int dof) const { return owner_[dof].first; }
  int owner_local(int dof) const { return owner_[dof].second; }

  /// True when DOF i coincides with mesh node i for all nodes.
  bool nodal() const { return nodal_; }

 private:
  const ReferenceElement* ref_ = nullptr;
  Continuity continuity_ = Continuity::Global;
  int npe_ = 0;
  int n_dofs_ = 0;
  bool nodal_ = false;
  std::vector<int> dofs_;
  std::vector<std::pair<int, int>> owner_;
};

/// Taylor-Hood (or Mini) pair. Velocity coefficients are interleaved:
/// entry 2*i + c is component c of scalar DOF i, so the leading 2*M entries
/// line up with the mesh nodal vector.
struct FESpacePair {
  int k = 2;
  ScalarSpace velocity;
  ScalarSpace pressure;
  bool zero_mean_pressure = true;
  std::vector<int> boundary_dofs;   // scalar velocity DOFs on the outer boundary
  std::vector<int> interface_dofs;  // scalar velocity DOFs on the interface

  int num_velocity() const { return 2 * velocity.num_dofs(); }
  int num_pressure() const { return pressure.num_dofs(); }
};

FESpacePair build_taylor_hood(const Mesh& mesh, int k,
                              Continuity pressure = Continuity::SubdomainDiscontinuous);
/// Experimental P1b-P1 pair.
FESpacePair build_mini(const Mesh& mesh, Continuity pressure = Continuity::SubdomainDiscontinuous);
/// Taylor-Hood for k >= 2 and Mini for k = 1.
FESpacePair build_spaces(const Mesh& mesh, int k, Continuity pressure = Continuity::SubdomainDiscontinuous);

using ScalarField = std::function<double(const Vec2&)>;
using PhaseField = std::function<double(const Vec2&, Phase)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Physical position of each DOF.
std::vector<Vec2> dof_positions(const ScalarSpace& space, const Mesh& mesh);

Vector interpolate(const ScalarSpace& space, const Mesh& mesh, const ScalarField& f);
Vector interpolate(const ScalarSpace& space, const Mesh& mesh, const PhaseField& f);
/// Interleaved vector interpolant.
Vector interpolate_vector(const ScalarSpace& space, const Mesh& mesh, const VectorField& f);

struct Location {
  int element = -1;
  Vec2 ref = Vec2::Zero();
  double outside = 0.0;  // 0 when inside, else distance outside in barycentric units
};

/// Solves F_K(p) = x by Newton's method (tolerance 1e-12). Returns nullopt on
/// non-convergence.
std::optional<Vec2> invert_element_map(const Mesh& mesh, int e, const Vec2& x);

/// Bucket grid over element bounding boxes. Keeps a reference to the mesh.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  /// Element containing x. With `side`, only elements of that phase are
  /// accepted; with `extrapolate`, the closest element of that phase is
  /// returned even when x lies slightly outside it.
  std::optional<Location> locate(const Vec2& x, std::optional<Phase> side = std::nullopt,
                                 bool extrapolate = false) const;
  /// Like locate but throws when nothing is found.
  Location find(const Vec2& x, std::optional<Phase> side = std::nullopt, bool extrapolate = false) const;

  const Mesh& mesh() const { return *mesh_; }

 private:
  void scan(int cx, int cy, const Vec2& x, std::optional<Phase> side, Location& best) const;

  const Mesh* mesh_;
  Vec2 lo_, cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<int> start_, items_;
};

double evaluate_at(const ScalarSpace& space, const Vector& coeffs, const Location& loc);
Vec2 evaluate_vector_at(const ScalarSpace& space, const Vector& coeffs, const Location& loc);
/// Physical gradient of a scalar field.
Vec2 gradient_at(const ScalarSpace& space, const Mesh& mesh, const Vector& coeffs, const Location& loc);
/// Physical Jacobian (row c = gradient of component c) of an interleaved vector field.
Mat2 vector_gradient_at(const ScalarSpace& space, const Mesh& mesh, const Vector& coeffs,
                        const Location& loc);

double evaluate(const ScalarSpace& space, const PointLocator& locator, const Vector& coeffs,
                const Vec2& x, std::optional<Phase> side = std::nullopt);

}  // namespace alefem
