#pragma once

// Tabulated reference bases and per-element geometry at quadrature points.

#include "alefem/fespace.hpp"
#include "alefem/quadrature.hpp"

#include <vector>

namespace alefem::detail {

struct Tabulation {
  int nq = 0, nb = 0;
  std::vector<double> phi;  // phi[q * nb + j]
  std::vector<Vec2> dphi;   // reference gradients

  Tabulation(const ReferenceElement& ref, const QuadRule& rule) : nq(static_cast<int>(rule.size())), nb(ref.num_nodes()) {
    phi.resize(static_cast<std::size_t>(nq) * nb);
    dphi.resize(static_cast<std::size_t>(nq) * nb);
    for (int q = 0; q < nq; ++q) {
      ref.values(rule.points[q], {phi.data() + q * nb, static_cast<std::size_t>(nb)});
      ref.gradients(rule.points[q], {dphi.data() + q * nb, static_cast<std::size_t>(nb)});
    }
  }
  double value(int q, int j) const { return phi[q * nb + j]; }
  const Vec2& grad(int q, int j) const { return dphi[q * nb + j]; }
};

struct QuadPoint {
  Vec2 x;
  Mat2 J;
  Mat2 Jinv;
  double detJ;
  double w;  // rule weight times detJ
};

/// Geometry of element e at every point of the rule, using the tabulated
/// mesh basis. Throws TangledElementError when detJ <= 0.
inline void element_geometry(const Mesh& mesh, int e, const QuadRule& rule, const Tabulation& geo,
                             std::vector<QuadPoint>& out) {
  out.resize(rule.size());
  auto nodes = mesh.element_nodes(e);
  const auto& x = mesh.coordinates();
  for (int q = 0; q < geo.nq; ++q) {
    QuadPoint& p = out[q];
    p.x.setZero();
    p.J.setZero();
    for (int j = 0; j < geo.nb; ++j) {
      const Vec2 xj(x[2 * nodes[j]], x[2 * nodes[j] + 1]);
      p.x += geo.value(q, j) * xj;
      p.J += xj * geo.grad(q, j).transpose();
    }
    p.detJ = p.J.determinant();
    if (!(p.detJ > 0.0)) throw TangledElementError(e, p.detJ);
    p.Jinv = p.J.inverse();
    p.w = rule.weights[q] * p.detJ;
  }
}

/// Volume rule used throughout: exact to degree 2k + 2 on the reference
/// (degree 6 on linear meshes so that bubble products are integrated exactly).
inline const QuadRule& volume_rule(const Mesh& mesh) {
  return triangle_rule(mesh.degree() == 1 ? 6 : std::min(2 * mesh.degree() + 2, kMaxTriangleDegree));
}

}  // namespace alefem::detail
