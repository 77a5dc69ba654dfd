#include "alefem/ale.hpp"

#include "alefem/assembly.hpp"
#include "alefem/linalg.hpp"

#include <sstream>

namespace alefem {

Vector harmonic_extension(const Mesh& mesh, const FESpacePair& spaces, const Vector& u) {
  const int n = spaces.velocity.num_dofs();
  if (static_cast<int>(u.size()) != 2 * n) throw Error("velocity vector size mismatch in harmonic extension");
  Vector w = Vector::Zero(2 * n);
  if (spaces.interface_dofs.empty()) return w;

  std::vector<int> dofs;
  dofs.reserve(spaces.interface_dofs.size() + spaces.boundary_dofs.size());
  dofs.insert(dofs.end(), spaces.interface_dofs.begin(), spaces.interface_dofs.end());
  dofs.insert(dofs.end(), spaces.boundary_dofs.begin(), spaces.boundary_dofs.end());

  SparseMatrix A = assemble_scalar(MatrixKind::A, mesh, spaces.velocity);
  std::array<Vector, 2> rhs;
  std::array<Vector, 2> values;
  for (int c = 0; c < 2; ++c) {
    rhs[c] = Vector::Zero(n);
    values[c] = Vector::Zero(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t i = 0; i < spaces.interface_dofs.size(); ++i)
      values[c][i] = u[2 * spaces.interface_dofs[i] + c];
  }
  // The elimination only touches the matrix, so both components share it.
  SparseMatrix Ad = A;
  apply_dirichlet(Ad, rhs[0], dofs, values[0]);
  apply_dirichlet(A, rhs[1], dofs, values[1]);
  LUFactorization lu(Ad);
  for (int c = 0; c < 2; ++c) {
    const Vector s = lu.solve(rhs[c]);
    for (int i = 0; i < n; ++i) w[2 * i + c] = s[i];
  }
  for (int d : spaces.boundary_dofs) w[2 * d] = w[2 * d + 1] = 0.0;
  for (int d : spaces.interface_dofs) {
    w[2 * d] = u[2 * d];
    w[2 * d + 1] = u[2 * d + 1];
  }
  return w;
}

std::vector<double> advance_mesh(std::span<const double> x, std::span<const double> w, double tau) {
  if (w.size() < x.size()) throw Error("mesh velocity shorter than the nodal vector");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + tau * w[i];
  return out;
}

Vector transfer_field(const ScalarSpace& old_space, const PointLocator& locator,
                      const Vector& coeffs, int components, const Mesh& new_mesh,
                      const ScalarSpace& new_space) {
  const auto pos = dof_positions(new_space, new_mesh);
  Vector out(components * new_space.num_dofs());
  for (int d = 0; d < new_space.num_dofs(); ++d) {
    const Phase side = new_mesh.phase(new_space.owner_element(d));
    const Location loc = locator.find(pos[d], side, true);
    if (components == 1) {
      out[d] = evaluate_at(old_space, coeffs, loc);
    } else {
      const Vec2 v = evaluate_vector_at(old_space, coeffs, loc);
      out[2 * d] = v.x();
      out[2 * d + 1] = v.y();
    }
  }
  if (new_space.reference().kind() == ReferenceElement::Kind::MiniBubble) {
    for (int e = 0; e < new_space.num_elements(); ++e) {
      auto d = new_space.dofs(e);
      for (int c = 0; c < components; ++c)
        out[components * d[3] + c] -= (out[components * d[0] + c] + out[components * d[1] + c] +
                                       out[components * d[2] + c]) / 3.0;
    }
  }
  return out;
}

namespace {
std::string interface_dump(const Mesh& mesh) {
  std::ostringstream os;
  os.precision(17);
  os << "interface nodes:";
  try {
    for (const auto& loop : interface_loops(mesh))
      for (const auto& e : loop) {
        const Vec2 p = mesh.node(edge_node_ids(mesh, e)[0]);
        os << " (" << p.x() << ", " << p.y() << ")";
      }
  } catch (const Error& err) {
    os << " <" << err.what() << ">";
  }
  return os.str();
}
}  // namespace

RemeshResult check_and_remesh(const Mesh& mesh, const FESpacePair& spaces, const Vector& u, const Vector& p,
                              const RemeshOptions& opt) {
  RemeshResult r;
  const double angle = quality(mesh).min_angle;
  r.min_angle_before = angle;
  if (angle > opt.angle_threshold) {
    r.mesh = mesh;
    r.spaces = spaces;
    r.u = u;
    r.p = p;
    r.min_angle = angle;
    return r;
  }
  try {
    r.mesh = refit_mesh(mesh, opt.rect, opt.h);
  } catch (const GeometryError& err) {
    throw GeometryError(std::string("remeshing failed: ") + err.what() + "; " + interface_dump(mesh));
  }
  r.min_angle = quality(r.mesh).min_angle;
  if (!(r.min_angle > opt.angle_threshold))
    throw GeometryError("remeshing did not beat the angle threshold (" + std::to_string(r.min_angle) + " rad); " +
                        interface_dump(mesh));
  r.spaces = build_spaces(r.mesh, spaces.k, opt.pressure);
  const PointLocator locator(mesh);
  r.u = transfer_field(spaces.velocity, locator, u, 2, r.mesh, r.spaces.velocity);
  r.p = transfer_field(spaces.pressure, locator, p, 1, r.mesh, r.spaces.pressure);
  r.did_remesh = true;
  return r;
}

}  // namespace alefem
