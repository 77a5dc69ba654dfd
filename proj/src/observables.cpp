#include "alefem/observables.hpp"

#include "element_data.hpp"

#include <cmath>
#include <numbers>

namespace alefem {

Vec2 center_of_mass(const Mesh& mesh) {
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  Vec2 moment = Vec2::Zero();
  double area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.phase(e) != Phase::Minus) continue;
    detail::element_geometry(mesh, e, rule, geo, qp);
    for (const auto& p : qp) {
      moment += p.w * p.x;
      area += p.w;
    }
  }
  if (!(area > 0.0)) throw GeometryError("mesh has no minus phase");
  return moment / area;
}

double interface_length(const Mesh& mesh) {
  static const Vec2 kDir[3] = {Vec2(1, 0), Vec2(-1, 1), Vec2(0, -1)};
  const auto& rule = edge_rule(2 * mesh.degree() + 2);
  double len = 0.0;
  for (const auto& e : mesh.interface_edges())
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 p = ReferenceElement::edge_point(e.local_edge, rule.points[q].x());
      len += rule.weights[q] * (element_map_unchecked(mesh, e.element, p).J * kDir[e.local_edge]).norm();
    }
  return len;
}

double circularity(const Mesh& mesh) {
  return 2.0 * std::sqrt(std::numbers::pi * phase_area(mesh, Phase::Minus)) / interface_length(mesh);
}

double rise_velocity(const Mesh& mesh, const ScalarSpace& velocity, const Vector& u) {
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(velocity.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  double integral = 0.0, area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.phase(e) != Phase::Minus) continue;
    detail::element_geometry(mesh, e, rule, geo, qp);
    auto d = velocity.dofs(e);
    for (int q = 0; q < tab.nq; ++q) {
      double uy = 0.0;
      for (int j = 0; j < tab.nb; ++j) uy += tab.value(q, j) * u[2 * d[j] + 1];
      integral += qp[q].w * uy;
      area += qp[q].w;
    }
  }
  if (!(area > 0.0)) throw GeometryError("mesh has no minus phase");
  return integral / area;
}

Energy energy(const Mesh& mesh, const ScalarSpace& velocity, const Vector& u, const PhaseParams& params) {
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(velocity.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  Energy en;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    detail::element_geometry(mesh, e, rule, geo, qp);
    const double rho = params.rho(mesh.phase(e));
    auto d = velocity.dofs(e);
    for (int q = 0; q < tab.nq; ++q) {
      Vec2 uq = Vec2::Zero();
      for (int j = 0; j < tab.nb; ++j) uq += tab.value(q, j) * Vec2(u[2 * d[j]], u[2 * d[j] + 1]);
      en.kinetic += 0.5 * rho * qp[q].w * uq.squaredNorm();
      en.potential += rho * params.g * qp[q].w * qp[q].x.y();
    }
  }
  en.total = en.kinetic + en.potential;
  return en;
}

}  // namespace alefem
