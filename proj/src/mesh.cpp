#include "alefem/mesh.hpp"

#include "alefem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace alefem {
namespace {

std::shared_ptr<const MeshTopology> build_topology(int num_nodes, int npe,
                                                   const std::vector<int>& conn,
                                                   const std::vector<Phase>& phase) {
  auto topo = std::make_shared<MeshTopology>();
  const int ne = static_cast<int>(phase.size());
  topo->vertex_of_node.assign(num_nodes, -1);
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < 3; ++i) topo->vertex_of_node[conn[e * npe + i]] = 0;
  for (int n = 0; n < num_nodes; ++n)
    if (topo->vertex_of_node[n] == 0) {
      topo->vertex_of_node[n] = static_cast<int>(topo->vertices.size());
      topo->vertices.push_back(n);
    }

  std::map<std::pair<int, int>, int> edge_id;
  topo->element_edges.resize(ne);
  static constexpr int kEdge[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int e = 0; e < ne; ++e) {
    for (int le = 0; le < 3; ++le) {
      int a = conn[e * npe + kEdge[le][0]], b = conn[e * npe + kEdge[le][1]];
      auto key = std::minmax(a, b);
      auto [it, inserted] = edge_id.try_emplace({key.first, key.second},
                                                static_cast<int>(topo->edges.size()));
      if (inserted) {
        topo->edges.push_back({key.first, key.second});
        topo->edge_elements.push_back({e, -1});
      } else {
        auto& slots = topo->edge_elements[it->second];
        if (slots[1] != -1)
          throw GeometryError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") shared by more than two elements");
        slots[1] = e;
      }
      topo->element_edges[e][le] = it->second;
    }
  }

  topo->node_on_interface.assign(num_nodes, 0);
  topo->node_on_boundary.assign(num_nodes, 0);
  const auto& ref = ReferenceElement::lagrange(npe == 3 ? 1 : (npe == 6 ? 2 : 3));
  auto mark = [&](int e, int le, std::vector<char>& flag) {
    for (int ln : ref.edge_nodes(le)) flag[conn[e * npe + ln]] = 1;
  };
  auto local_edge = [&](int e, int edge) {
    for (int le = 0; le < 3; ++le)
      if (topo->element_edges[e][le] == edge) return le;
    return -1;
  };
  for (int ed = 0; ed < static_cast<int>(topo->edges.size()); ++ed) {
    auto [e0, e1] = topo->edge_elements[ed];
    if (e1 < 0) {
      topo->boundary_edges.push_back({e0, local_edge(e0, ed)});
      mark(e0, local_edge(e0, ed), topo->node_on_boundary);
    } else if (phase[e0] != phase[e1]) {
      const int em = phase[e0] == Phase::Minus ? e0 : e1;
      topo->interface_edges.push_back({em, local_edge(em, ed)});
      mark(em, local_edge(em, ed), topo->node_on_interface);
    }
  }
  return topo;
}

}  // namespace

Mesh::Mesh(int degree, std::vector<double> coords, std::vector<int> connectivity,
           std::vector<Phase> phases)
    : degree_(degree), x_(std::move(coords)), conn_(std::move(connectivity)), phase_(std::move(phases)) {
  if (degree < 1 || degree > 3) throw GeometryError("mesh degree must be 1, 2 or 3");
  if (x_.size() % 2 != 0) throw GeometryError("coordinate vector has odd length");
  if (conn_.size() != phase_.size() * static_cast<std::size_t>(nodes_per_element()))
    throw GeometryError("connectivity size does not match element count");
  for (int n : conn_)
    if (n < 0 || n >= num_nodes()) throw GeometryError("connectivity references missing node " + std::to_string(n));
  topo_ = build_topology(num_nodes(), nodes_per_element(), conn_, phase_);
}

std::array<Vec2, 3> Mesh::corners(int e) const {
  auto n = element_nodes(e);
  return {node(n[0]), node(n[1]), node(n[2])};
}

bool Mesh::is_curved(int e) const {
  if (degree_ == 1) return false;
  auto c = corners(e);
  auto n = element_nodes(e);
  const auto& nodes = reference().nodes();
  const double scale = (c[1] - c[0]).norm() + (c[2] - c[0]).norm();
  for (int i = 3; i < nodes_per_element(); ++i) {
    const Vec2 lin = c[0] + nodes[i].x() * (c[1] - c[0]) + nodes[i].y() * (c[2] - c[0]);
    if ((node(n[i]) - lin).norm() > 1e-14 * scale) return true;
  }
  return false;
}

Mesh Mesh::displaced(std::span<const double> d) const {
  if (d.size() < x_.size()) throw Error("displacement shorter than the nodal vector");
  std::vector<double> x(x_);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += d[i];
  return with_coordinates(std::move(x));
}

Mesh Mesh::with_coordinates(std::vector<double> coords) const {
  if (coords.size() != x_.size()) throw Error("coordinate vector size mismatch");
  Mesh m;
  m.degree_ = degree_;
  m.x_ = std::move(coords);
  m.conn_ = conn_;
  m.phase_ = phase_;
  m.topo_ = topo_;
  return m;
}

ElementMap element_map_unchecked(const Mesh& mesh, int e, const Vec2& p) {
  const auto& ref = mesh.reference();
  const int n = ref.num_nodes();
  double phi[10];
  Vec2 dphi[10];
  ref.values(p, {phi, static_cast<std::size_t>(n)});
  ref.gradients(p, {dphi, static_cast<std::size_t>(n)});
  auto nodes = mesh.element_nodes(e);
  ElementMap m;
  m.x.setZero();
  m.J.setZero();
  for (int i = 0; i < n; ++i) {
    const Vec2 xi = mesh.node(nodes[i]);
    m.x += phi[i] * xi;
    m.J += xi * dphi[i].transpose();
  }
  m.detJ = m.J.determinant();
  return m;
}

ElementMap element_map(const Mesh& mesh, int e, const Vec2& p) {
  ElementMap m = element_map_unchecked(mesh, e, p);
  if (!(m.detJ > 0.0)) throw TangledElementError(e, m.detJ);
  return m;
}

double min_corner_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p, v = r - p;
    const double cr = u.x() * v.y() - u.y() * v.x();
    return std::atan2(std::abs(cr), u.dot(v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

MeshQuality quality(const Mesh& mesh) {
  MeshQuality q;
  q.min_angle = std::numbers::pi;
  q.min_jacobian = std::numeric_limits<double>::infinity();
  const auto& rule = triangle_rule(std::min(2 * mesh.degree() + 2, kMaxTriangleDegree));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto c = mesh.corners(e);
    q.min_angle = std::min(q.min_angle, min_corner_angle(c[0], c[1], c[2]));
    q.h_max = std::max({q.h_max, (c[1] - c[0]).norm(), (c[2] - c[1]).norm(), (c[0] - c[2]).norm()});
    const Vec2 u = c[1] - c[0], v = c[2] - c[0];
    const double det_affine = u.x() * v.y() - u.y() * v.x();
    for (const auto& p : rule.points) {
      const double det = element_map_unchecked(mesh, e, p).detJ;
      q.min_jacobian = std::min(q.min_jacobian, det / std::abs(det_affine));
    }
  }
  return q;
}

Mesh displace(const Mesh& mesh, std::span<const double> d) { return mesh.displaced(d); }

void check_valid(const Mesh& mesh) {
  const auto& rule = triangle_rule(std::min(2 * mesh.degree() + 2, kMaxTriangleDegree));
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (const auto& p : rule.points) element_map(mesh, e, p);
}

std::vector<int> edge_node_ids(const Mesh& mesh, const EdgeRef& edge) {
  auto nodes = mesh.element_nodes(edge.element);
  std::vector<int> out;
  for (int ln : mesh.reference().edge_nodes(edge.local_edge)) out.push_back(nodes[ln]);
  return out;
}

Vec2 edge_position(const Mesh& mesh, const EdgeRef& edge, double s) {
  return element_map_unchecked(mesh, edge.element, ReferenceElement::edge_point(edge.local_edge, s)).x;
}

std::vector<std::vector<EdgeRef>> interface_loops(const Mesh& mesh) {
  const auto& edges = mesh.interface_edges();
  std::map<int, std::size_t> by_start;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const int start = edge_node_ids(mesh, edges[i])[0];
    if (!by_start.emplace(start, i).second)
      throw GeometryError("interface is not a set of simple closed curves (node " +
                          std::to_string(start) + ")");
  }
  std::vector<char> used(edges.size(), 0);
  std::vector<std::vector<EdgeRef>> loops;
  for (std::size_t first = 0; first < edges.size(); ++first) {
    if (used[first]) continue;
    std::vector<EdgeRef> loop;
    std::size_t cur = first;
    while (!used[cur]) {
      used[cur] = 1;
      loop.push_back(edges[cur]);
      const int end = edge_node_ids(mesh, edges[cur])[1];
      auto it = by_start.find(end);
      if (it == by_start.end()) throw GeometryError("open interface curve at node " + std::to_string(end));
      cur = it->second;
    }
    if (cur != first) throw GeometryError("interface loop does not close");
    loops.push_back(std::move(loop));
  }
  return loops;
}

namespace {
double integrate_area(const Mesh& mesh, int phase_filter) {
  const auto& rule = triangle_rule(std::min(2 * mesh.degree() + 2, kMaxTriangleDegree));
  double area = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (phase_filter >= 0 && static_cast<int>(mesh.phase(e)) != phase_filter) continue;
    for (std::size_t q = 0; q < rule.size(); ++q)
      area += rule.weights[q] * element_map_unchecked(mesh, e, rule.points[q]).detJ;
  }
  return area;
}
}  // namespace

double mesh_area(const Mesh& mesh) { return integrate_area(mesh, -1); }
double phase_area(const Mesh& mesh, Phase phase) { return integrate_area(mesh, static_cast<int>(phase)); }

}  // namespace alefem
