#include "helpers.hpp"

#include <doctest.h>

#include <numbers>
#include <queue>

using namespace testing;
using std::numbers::pi;

namespace {

Mesh single_triangle(const Vec2& a, const Vec2& b, const Vec2& c) {
  return Mesh(1, {a.x(), a.y(), b.x(), b.y(), c.x(), c.y()}, {0, 1, 2}, {Phase::Plus});
}

// Number of edge-connected components among elements of one phase.
int components(const Mesh& mesh, Phase phase) {
  const auto& topo = mesh.topology();
  std::vector<int> seen(mesh.num_elements(), 0);
  int count = 0;
  for (int s = 0; s < mesh.num_elements(); ++s) {
    if (seen[s] || mesh.phase(s) != phase) continue;
    ++count;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int e = q.front();
      q.pop();
      for (int le = 0; le < 3; ++le)
        for (int nb : topo.edge_elements[topo.element_edges[e][le]])
          if (nb >= 0 && !seen[nb] && mesh.phase(nb) == phase) {
            seen[nb] = 1;
            q.push(nb);
          }
    }
  }
  return count;
}

}  // namespace

TEST_CASE("bubble mesh covers the rectangle and fits the circle") {
  for (int k = 1; k <= 3; ++k) {
    CAPTURE(k);
    const double h = 0.04;
    const Mesh m = bubble(h, k);
    CHECK(m.degree() == k);
    CHECK(std::abs(mesh_area(m) - 2.0) < 1e-10);
    CHECK(std::abs(phase_area(m, Phase::Minus) - pi / 16.0) < 2.0 * std::pow(h, k + 1));
    CHECK(quality(m).min_angle > pi / 18.0);
    CHECK(quality(m).min_jacobian > 0.0);
    for (int i = 0; i < m.num_nodes(); ++i)
      if (m.topology().node_on_interface[i]) CHECK(std::abs((m.node(i) - Vec2(0.5, 0.5)).norm() - 0.25) < 1e-14);
    for (int e = 0; e < m.num_elements(); ++e) {
      if (!m.is_curved(e)) continue;
      bool touches = false;
      for (int node : m.element_nodes(e)) touches = touches || m.topology().node_on_interface[node];
      CHECK(touches);
    }
  }
}

TEST_CASE("bubble mesh size is comparable to the benchmark mesh") {
  const Mesh m = bubble(0.04, 2);
  // about 2 / (sqrt(3)/4 * h^2) = 2887 equilateral triangles of side h
  CHECK(m.num_elements() > 2000);
  CHECK(m.num_elements() < 4000);
  CHECK(quality(m).h_max < 2.0 * 0.04);
}

TEST_CASE("minus-phase area converges at order k+1") {
  for (int k = 2; k <= 3; ++k) {
    const double e1 = std::abs(phase_area(bubble(0.08, k), Phase::Minus) - pi / 16.0);
    const double e2 = std::abs(phase_area(bubble(0.04, k), Phase::Minus) - pi / 16.0);
    CAPTURE(k);
    CHECK(e2 < e1);
  }
}

TEST_CASE("circle leaving the rectangle is rejected") {
  CHECK_THROWS_WITH_AS(generate_bubble_mesh(Rect{}, {0.5, 0.5}, 0.6, 0.04, 2),
                       doctest::Contains("circle exits rectangle"), GeometryError);
}

TEST_CASE("interface topology") {
  const Mesh m = bubble(0.1, 2);
  const auto loops = interface_loops(m);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].size() == m.interface_edges().size());
  const auto& topo = m.topology();
  for (const EdgeRef& er : m.interface_edges()) {
    const auto nb = topo.edge_elements[topo.element_edges[er.element][er.local_edge]];
    REQUIRE(nb[0] >= 0);
    REQUIRE(nb[1] >= 0);
    CHECK(m.phase(nb[0]) != m.phase(nb[1]));
  }
  // consecutive edges share their end node
  for (std::size_t i = 0; i < loops[0].size(); ++i) {
    const auto a = edge_node_ids(m, loops[0][i]);
    const auto b = edge_node_ids(m, loops[0][(i + 1) % loops[0].size()]);
    CHECK(a[1] == b[0]);
  }
  CHECK(components(m, Phase::Plus) == 1);
  CHECK(components(m, Phase::Minus) == 1);
}

TEST_CASE("element map examples") {
  const Mesh affine = single_triangle({0, 0}, {2, 0}, {0, 2});
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) CHECK(element_map(affine, 0, random_reference_point(rng)).detJ == doctest::Approx(4.0));

  const Mesh id = single_triangle({0, 0}, {1, 0}, {0, 1});
  const ElementMap em = element_map(id, 0, {0.2, 0.3});
  CHECK((em.J - Mat2::Identity()).norm() < 1e-15);
  CHECK((em.x - Vec2(0.2, 0.3)).norm() < 1e-15);

  // quadratic element whose edge 0 midpoint is pushed 0.05 along the normal
  const Mesh curved(2, {0, 0, 1, 0, 0, 1, 0.5, -0.05, 0.5, 0.5, 0, 0.5}, {0, 1, 2, 3, 4, 5}, {Phase::Plus});
  CHECK(curved.is_curved(0));
  const double eps = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const Vec2 p = random_reference_point(rng) * 0.9 + Vec2(0.03, 0.03);
    const Mat2 J = element_map(curved, 0, p).J;
    for (int d = 0; d < 2; ++d) {
      Vec2 e = Vec2::Zero();
      e[d] = eps;
      const Vec2 fd = (element_map(curved, 0, p + e).x - element_map(curved, 0, p - e).x) / (2 * eps);
      CHECK((fd - J.col(d)).norm() < 1e-6);
    }
  }
}

TEST_CASE("tangled element is reported with its id") {
  const Mesh flipped = Mesh(1, {0, 0, 0, 1, 1, 0, 1, 1}, {0, 2, 3, 0, 1, 2}, {Phase::Plus, Phase::Plus});
  try {
    element_map(flipped, 1, {0.2, 0.2});
    FAIL("expected a tangled element error");
  } catch (const TangledElementError& e) {
    CHECK(e.element() == 1);
    CHECK(e.det() < 0.0);
  }
  CHECK_THROWS_AS(check_valid(flipped), TangledElementError);
}

TEST_CASE("quality examples") {
  CHECK(quality(single_triangle({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2})).min_angle == doctest::Approx(pi / 3));
  CHECK(quality(single_triangle({0, 0}, {1, 0}, {0, 1})).min_angle == doctest::Approx(pi / 4));
  const double needle = quality(single_triangle({0, 0}, {1, 0}, {0.5, 1e-4})).min_angle;
  // law of cosines: the angle at (0,0) is atan(1e-4 / 0.5)
  CHECK(needle == doctest::Approx(std::atan(2e-4)).epsilon(1e-9));
  CHECK(needle < 1e-3);
}

TEST_CASE("displacement") {
  const Mesh m = bubble(0.1, 2);
  const std::vector<double> zero(m.coordinates().size(), 0.0);
  const Mesh same = displace(m, zero);
  CHECK(same.coordinates() == m.coordinates());
  CHECK(same.connectivity() == m.connectivity());

  std::vector<double> shift(m.coordinates().size());
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = i % 2 == 0 ? 0.1 : 0.0;
  const Mesh moved = displace(m, shift);
  CHECK(std::abs(mesh_area(moved) - mesh_area(m)) < 1e-14);
  CHECK(std::abs(phase_area(moved, Phase::Minus) - phase_area(m, Phase::Minus)) < 1e-14);
  CHECK(&moved.topology() == &m.topology());

  std::mt19937_64 rng(9);
  const Vector d = random_vector(rng, static_cast<Eigen::Index>(m.coordinates().size()), 1e-3);
  const Mesh perturbed = displace(m, as_span(d));
  CHECK_NOTHROW(check_valid(perturbed));
  CHECK(quality(perturbed).min_jacobian > 0.0);
}

TEST_CASE("nested meshes refine uniformly") {
  const auto levels = generate_nested_bubble_meshes(Rect{}, {0.5, 0.5}, 0.25, 0.16, 2, 3);
  REQUIRE(levels.size() == 3);
  CHECK(levels[1].num_elements() == 4 * levels[0].num_elements());
  CHECK(levels[2].num_elements() == 4 * levels[1].num_elements());
  for (const Mesh& m : levels) {
    CHECK(std::abs(mesh_area(m) - 2.0) < 1e-10);
    for (int i = 0; i < m.num_nodes(); ++i)
      if (m.topology().node_on_interface[i]) CHECK(std::abs((m.node(i) - Vec2(0.5, 0.5)).norm() - 0.25) < 1e-14);
  }
}

TEST_CASE("structured rectangle mesh") {
  const Mesh m = unit_square(1, 2);
  CHECK(m.num_elements() == 2);
  CHECK(m.num_nodes() == 9);
  CHECK(m.interface_edges().empty());
  CHECK(m.boundary_edges().size() == 4);
}

TEST_CASE("mesher keeps the angle bound next to very short interface segments") {
  // a circle sampled coarsely except for one cluster of tiny segments
  InterfaceCurve curve;
  std::vector<double> theta;
  for (int i = 0; i < 24; ++i) theta.push_back(2.0 * pi * i / 24.0);
  for (int i = 1; i < 12; ++i) theta.push_back(2.0 * pi / 24.0 * i / 12.0);
  std::sort(theta.begin(), theta.end());
  for (double t : theta) curve.vertices.push_back(Vec2(0.5, 1.0) + 0.3 * Vec2(std::cos(t), std::sin(t)));
  const Triangulation tri = triangulate_fitted(Rect{}, curve, 0.05);

  double area = 0.0, angle = pi;
  for (const auto& t : tri.triangles) {
    const Vec2 &a = tri.points[t[0]], &b = tri.points[t[1]], &c = tri.points[t[2]];
    const Vec2 u = b - a, v = c - a;
    area += 0.5 * (u.x() * v.y() - u.y() * v.x());
    angle = std::min(angle, min_corner_angle(a, b, c));
  }
  CHECK(std::abs(area - 2.0) < 1e-12);
  CHECK(angle > pi / 18.0);
  REQUIRE(tri.interface_loop.size() == curve.vertices.size());
  for (std::size_t i = 0; i < curve.vertices.size(); ++i)
    CHECK(tri.points[tri.interface_loop[i]] == curve.vertices[i]);
}
