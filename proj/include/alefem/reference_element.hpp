#pragma once

#include "alefem/common.hpp"

#include <span>
#include <vector>

namespace alefem {

/// Lagrange element on the reference triangle with vertices (0,0), (1,0), (0,1).
///
/// Node order follows the Gmsh convention: the three vertices, then the
/// k-1 nodes of each edge (0->1, 1->2, 2->0) ordered from the first vertex,
/// then interior nodes. The Mini variant appends the cubic bubble
/// 27*l0*l1*l2 to the P1 basis; its extra "node" is the centroid.
class ReferenceElement {
 public:
  enum class Kind { Lagrange, MiniBubble };

  static const ReferenceElement& lagrange(int degree);
  static const ReferenceElement& mini();

  int degree() const { return degree_; }
  Kind kind() const { return kind_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec2>& nodes() const { return nodes_; }

  /// Local node indices of edge `e` (0..2), vertices first then interior
  /// edge nodes ordered from the first vertex of the edge.
  std::vector<int> edge_nodes(int e) const;

  void values(const Vec2& p, std::span<double> out) const;
  void gradients(const Vec2& p, std::span<Vec2> out) const;

  /// Reference point on edge `e` at parameter s in [0,1].
  static Vec2 edge_point(int e, double s);

 private:
  ReferenceElement(int degree, Kind kind);

  int degree_;
  Kind kind_;
  std::vector<Vec2> nodes_;
  // Lagrange part: coefficients in the monomial basis x^a y^b, a + b <= degree.
  std::vector<std::pair<int, int>> monomials_;
  Eigen::MatrixXd coeffs_;
};

}  // namespace alefem
