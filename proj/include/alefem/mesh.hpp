#pragma once

#include "alefem/common.hpp"
#include "alefem/reference_element.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace alefem {

/// An edge seen from one of its elements.
struct EdgeRef {
  int element = -1;
  int local_edge = -1;
  bool operator==(const EdgeRef&) const = default;
};

/// Connectivity-derived data shared by a mesh and all of its displaced copies.
struct MeshTopology {
  std::vector<int> vertices;       // node ids used as element corners, ascending
  std::vector<int> vertex_of_node; // -1 for non-corner nodes
  std::vector<std::array<int, 2>> edges;           // corner node ids, lo < hi
  std::vector<std::array<int, 3>> element_edges;   // per element, local edge -> edge id
  std::vector<std::array<int, 2>> edge_elements;   // -1 when absent
  std::vector<EdgeRef> interface_edges;  // seen from the minus element
  std::vector<EdgeRef> boundary_edges;
  std::vector<char> node_on_interface;
  std::vector<char> node_on_boundary;
};

/// Geometry of F_K at one reference point.
struct ElementMap {
  Vec2 x;
  Mat2 J;  // J(i, j) = d x_i / d xhat_j
  double detJ = 0.0;
};

/// Curved isoparametric triangulation of degree k fitted to the interface.
///
/// Coordinates are stored interleaved: x[2*i], x[2*i+1] is node i. Element
/// node lists follow ReferenceElement ordering. The value is immutable;
/// `displaced` produces a new mesh sharing the topology.
class Mesh {
 public:
  Mesh() = default;
  Mesh(int degree, std::vector<double> coords, std::vector<int> connectivity,
       std::vector<Phase> phases);

  int degree() const { return degree_; }
  int nodes_per_element() const { return (degree_ + 1) * (degree_ + 2) / 2; }
  int num_nodes() const { return static_cast<int>(x_.size() / 2); }
  int num_elements() const { return static_cast<int>(phase_.size()); }
  const ReferenceElement& reference() const { return ReferenceElement::lagrange(degree_); }

  const std::vector<double>& coordinates() const { return x_; }
  Vec2 node(int i) const { return {x_[2 * i], x_[2 * i + 1]}; }
  std::span<const int> element_nodes(int e) const {
    return {conn_.data() + static_cast<std::size_t>(e) * nodes_per_element(),
            static_cast<std::size_t>(nodes_per_element())};
  }
  const std::vector<int>& connectivity() const { return conn_; }
  Phase phase(int e) const { return phase_[e]; }
  const std::vector<Phase>& phases() const { return phase_; }
  const MeshTopology& topology() const { return *topo_; }
  const std::vector<EdgeRef>& interface_edges() const { return topo_->interface_edges; }
  const std::vector<EdgeRef>& boundary_edges() const { return topo_->boundary_edges; }

  /// Straight-vertex triangle corners of element e.
  std::array<Vec2, 3> corners(int e) const;
  /// True when some non-corner node deviates from its affine position.
  bool is_curved(int e) const;

  Mesh displaced(std::span<const double> d) const;
  Mesh with_coordinates(std::vector<double> coords) const;

 private:
  int degree_ = 1;
  std::vector<double> x_;
  std::vector<int> conn_;
  std::vector<Phase> phase_;
  std::shared_ptr<const MeshTopology> topo_;
};

struct MeshQuality {
  double min_angle = 0.0;     // radians
  double min_jacobian = 0.0;  // detJ relative to the straight-vertex triangle
  double h_max = 0.0;
};

/// F_K(p), its Jacobian and determinant. Throws TangledElementError when
/// detJ <= 0.
ElementMap element_map(const Mesh& mesh, int e, const Vec2& p);
/// Same without the positivity check.
ElementMap element_map_unchecked(const Mesh& mesh, int e, const Vec2& p);

MeshQuality quality(const Mesh& mesh);
double min_corner_angle(const Vec2& a, const Vec2& b, const Vec2& c);

Mesh displace(const Mesh& mesh, std::span<const double> d);

/// Throws TangledElementError for the first element with detJ <= 0 at any
/// point of the volume rule.
void check_valid(const Mesh& mesh);

/// Interface edges ordered into closed loops (minus-side orientation).
std::vector<std::vector<EdgeRef>> interface_loops(const Mesh& mesh);

/// Node ids along an edge as seen from its element: both corners, then the
/// interior edge nodes in that orientation.
std::vector<int> edge_node_ids(const Mesh& mesh, const EdgeRef& edge);

/// Point on a (possibly curved) edge at parameter s in [0, 1].
Vec2 edge_position(const Mesh& mesh, const EdgeRef& edge, double s);

double mesh_area(const Mesh& mesh);
double phase_area(const Mesh& mesh, Phase phase);

}  // namespace alefem
