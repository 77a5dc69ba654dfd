#include "alefem/mesh_generation.hpp"

#include "alefem/quadrature.hpp"
#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>

namespace alefem {
namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

bool inside_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

// Deterministic jitter in [-1, 1] from lattice indices.
double jitter(int i, int j, int salt) {
  std::uint32_t h = static_cast<std::uint32_t>(i) * 73856093u ^ static_cast<std::uint32_t>(j) * 19349663u ^
                    static_cast<std::uint32_t>(salt) * 83492791u;
  h ^= h >> 13;
  h *= 0x5bd1e995u;
  h ^= h >> 15;
  return (h % 20001u) / 10000.0 - 1.0;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a, v = c - a;
  const double d = 2.0 * (u.x() * v.y() - u.y() * v.x());
  return a + Vec2(v.y() * u.squaredNorm() - u.y() * v.squaredNorm(), u.x() * v.squaredNorm() - v.x() * u.squaredNorm()) / d;
}

Triangulation try_triangulate(const Rect& rect, const InterfaceCurve& curve, double h, int attempt, bool refine) {
  detail::ConstrainedDelaunay cdt(Vec2(rect.x0, rect.y0), Vec2(rect.x1, rect.y1));
  std::vector<char> fixed;
  auto add = [&](const Vec2& p, bool is_fixed) {
    const int id = cdt.insert(p);
    fixed.push_back(is_fixed ? 1 : 0);
    return id;
  };

  // Rectangle boundary, counter-clockwise from (x0, y0).
  std::vector<int> boundary;
  const std::array<Vec2, 4> corner{Vec2(rect.x0, rect.y0), Vec2(rect.x1, rect.y0), Vec2(rect.x1, rect.y1),
                                   Vec2(rect.x0, rect.y1)};
  for (int s = 0; s < 4; ++s) {
    const Vec2 a = corner[s], b = corner[(s + 1) % 4];
    const int n = std::max(1, static_cast<int>(std::lround((b - a).norm() / h)));
    for (int i = 0; i < n; ++i) boundary.push_back(add(a + (b - a) * (double(i) / n), true));
  }

  std::vector<int> loop;
  for (const auto& v : curve.vertices) loop.push_back(add(v, true));

  // Interior fill from a triangular lattice, kept clear of all constrained segments.
  const double dy = h * std::sqrt(3.0) / 2.0;
  const double margin = 0.5 * h;
  const Vec2 shift = attempt == 0 ? Vec2(0.0, 0.0) : Vec2(0.37 * h * attempt, 0.23 * h * attempt);
  const auto& poly = curve.vertices;
  const int rows = static_cast<int>(std::ceil(rect.height() / dy)) + 2;
  const int cols = static_cast<int>(std::ceil(rect.width() / h)) + 2;
  for (int j = -1; j < rows; ++j) {
    for (int i = -1; i < cols; ++i) {
      Vec2 p(rect.x0 + i * h + ((j & 1) ? 0.5 * h : 0.0), rect.y0 + j * dy);
      p += shift + 1e-3 * h * Vec2(jitter(i, j, 1), jitter(i, j, 2));
      if (p.x() < rect.x0 + margin || p.x() > rect.x1 - margin || p.y() < rect.y0 + margin ||
          p.y() > rect.y1 - margin)
        continue;
      bool keep = true;
      for (std::size_t e = 0; e < poly.size() && keep; ++e) {
        const Vec2& a = poly[e];
        const Vec2& b = poly[(e + 1) % poly.size()];
        if (segment_distance(p, a, b) < margin) keep = false;
        // keep each interface segment Gabriel so it survives as a Delaunay edge
        else if ((p - 0.5 * (a + b)).norm() < 0.5 * (b - a).norm() * 1.05)
          keep = false;
      }
      if (keep) add(p, false);
    }
  }

  for (std::size_t i = 0; i < boundary.size(); ++i) cdt.constrain(boundary[i], boundary[(i + 1) % boundary.size()]);
  for (std::size_t i = 0; i < loop.size(); ++i) cdt.constrain(loop[i], loop[(i + 1) % loop.size()]);
  cdt.legalize();
  cdt.smooth(fixed, 8);

  // Circumcenter insertion for thin triangles. Points that would encroach on a
  // constrained segment are skipped, so the segments themselves stay intact.
  if (refine) {
    std::vector<std::pair<Vec2, Vec2>> segments;
    for (std::size_t i = 0; i < boundary.size(); ++i)
      segments.emplace_back(cdt.point(boundary[i]), cdt.point(boundary[(i + 1) % boundary.size()]));
    for (std::size_t i = 0; i < loop.size(); ++i)
      segments.emplace_back(cdt.point(loop[i]), cdt.point(loop[(i + 1) % loop.size()]));
    constexpr double kTarget = std::numbers::pi / 9.0;
    for (int round = 0; round < 12; ++round) {
      std::vector<std::pair<Vec2, double>> accepted;
      for (const auto& t : cdt.triangles()) {
        const Vec2 &a = cdt.point(t[0]), &b = cdt.point(t[1]), &c = cdt.point(t[2]);
        if (min_corner_angle(a, b, c) >= kTarget) continue;
        const Vec2 cc = circumcenter(a, b, c);
        const double r = (cc - a).norm();
        if (!(cc.x() > rect.x0 && cc.x() < rect.x1 && cc.y() > rect.y0 && cc.y() < rect.y1)) continue;
        if (!poly.empty() && inside_polygon(cc, poly) != inside_polygon((a + b + c) / 3.0, poly)) continue;
        bool ok = true;
        for (const auto& [p, q] : segments)
          if ((cc - 0.5 * (p + q)).norm() <= 0.5 * (q - p).norm()) {
            ok = false;
            break;
          }
        for (const auto& [q, rq] : accepted)
          if ((cc - q).norm() < 0.5 * std::min(r, rq)) ok = false;
        if (ok) accepted.emplace_back(cc, r);
      }
      if (accepted.empty()) break;
      bool inserted = false;
      for (const auto& [q, r] : accepted)
        if (cdt.try_insert(q) >= 0) {
          fixed.push_back(0);
          inserted = true;
        }
      if (!inserted) break;
      cdt.legalize();
    }
  }

  Triangulation tri;
  for (int i = 0; i < cdt.num_points(); ++i) tri.points.push_back(cdt.point(i));
  tri.triangles = cdt.triangles();
  tri.interface_loop = loop;
  for (const auto& t : tri.triangles) {
    const Vec2 c = (tri.points[t[0]] + tri.points[t[1]] + tri.points[t[2]]) / 3.0;
    tri.phase.push_back(!poly.empty() && inside_polygon(c, poly) ? Phase::Minus : Phase::Plus);
  }
  return tri;
}

double min_angle(const Triangulation& tri) {
  double a = std::numbers::pi;
  for (const auto& t : tri.triangles)
    a = std::min(a, min_corner_angle(tri.points[t[0]], tri.points[t[1]], tri.points[t[2]]));
  return a;
}

}  // namespace

InterfaceCurve circle_curve(const Vec2& center, double radius, int segments) {
  InterfaceCurve c;
  const double dtheta = 2.0 * std::numbers::pi / segments;
  auto at = [=](double theta) { return Vec2(center + radius * Vec2(std::cos(theta), std::sin(theta))); };
  for (int i = 0; i < segments; ++i) c.vertices.push_back(at(i * dtheta));
  c.edge_point = [=](std::size_t e, double s) { return at((static_cast<double>(e) + s) * dtheta); };
  return c;
}

InterfaceCurve ellipse_curve(const Vec2& center, double a, double b, int segments) {
  InterfaceCurve c;
  const double dtheta = 2.0 * std::numbers::pi / segments;
  auto at = [=](double t) { return Vec2(center + Vec2(a * std::cos(t), b * std::sin(t))); };
  for (int i = 0; i < segments; ++i) c.vertices.push_back(at(i * dtheta));
  c.edge_point = [=](std::size_t e, double s) { return at((static_cast<double>(e) + s) * dtheta); };
  return c;
}

InterfaceCurve half_disk_curve(const Vec2& center, double radius, int arc_segments, int diameter_segments) {
  InterfaceCurve c;
  const double dtheta = std::numbers::pi / arc_segments;
  auto arc = [=](double t) { return Vec2(center + radius * Vec2(std::cos(t), std::sin(t))); };
  auto diam = [=](double s) { return Vec2(center + Vec2(-radius + 2.0 * radius * s, 0.0)); };
  for (int i = 0; i < arc_segments; ++i) c.vertices.push_back(arc(i * dtheta));
  for (int i = 0; i < diameter_segments; ++i) c.vertices.push_back(diam(double(i) / diameter_segments));
  c.edge_point = [=](std::size_t e, double s) {
    const int ie = static_cast<int>(e);
    if (ie < arc_segments) return arc((ie + s) * dtheta);
    return diam((ie - arc_segments + s) / diameter_segments);
  };
  return c;
}

InterfaceCurve curve_from_mesh(const Mesh& mesh) {
  auto loops = interface_loops(mesh);
  if (loops.size() != 1)
    throw GeometryError("expected a single closed interface, found " + std::to_string(loops.size()));
  auto shared = std::make_shared<const Mesh>(mesh);
  auto edges = std::make_shared<const std::vector<EdgeRef>>(loops.front());
  InterfaceCurve c;
  for (const auto& e : *edges) c.vertices.push_back(mesh.node(edge_node_ids(mesh, e)[0]));
  const int k = mesh.degree();
  c.edge_point = [shared, edges, k](std::size_t i, double s) {
    const EdgeRef& e = (*edges)[i];
    const double js = s * k;
    const long j = std::lround(js);
    if (std::abs(js - j) < 1e-12) {
      const auto ids = edge_node_ids(*shared, e);
      const int id = j == 0 ? ids[0] : (j == k ? ids[1] : ids[1 + j]);
      return shared->node(id);
    }
    return edge_position(*shared, e, s);
  };
  return c;
}

Triangulation triangulate_fitted(const Rect& rect, const InterfaceCurve& curve, double h) {
  if (!(h > 0.0)) throw GeometryError("mesh size must be positive");
  if (!curve.vertices.empty()) {
    if (curve.vertices.size() < 3) throw GeometryError("interface polygon needs at least 3 vertices");
    for (const auto& v : curve.vertices) {
      const double d = std::min({v.x() - rect.x0, rect.x1 - v.x(), v.y() - rect.y0, rect.y1 - v.y()});
      if (!(d > 0.1 * h))
        throw GeometryError("interface vertex (" + std::to_string(v.x()) + ", " + std::to_string(v.y()) +
                            ") is not strictly inside the rectangle");
    }
    if (signed_area(curve.vertices) <= 0.0) throw GeometryError("interface polygon must be counter-clockwise");
  }
  constexpr double kAngleBound = std::numbers::pi / 18.0;
  double best = 0.0;
  std::string failure;
  for (int attempt = 0; attempt < 5; ++attempt) {
    // the last attempt adds refinement points near short interface segments
    Triangulation tri;
    try {
      tri = try_triangulate(rect, curve, h, attempt % 4, attempt == 4);
    } catch (const GeometryError& e) {
      failure = e.what();
      continue;
    }
    best = std::max(best, min_angle(tri));
    if (min_angle(tri) > kAngleBound) return tri;
  }
  throw GeometryError("mesher could not reach the minimum angle bound (best " +
                      std::to_string(best * 180.0 / std::numbers::pi) + " deg" +
                      (failure.empty() ? "" : "; " + failure) + ")");
}

Triangulation refine_uniform(const Triangulation& tri, InterfaceCurve& curve) {
  Triangulation out;
  out.points = tri.points;
  std::map<std::pair<int, int>, int> mid;
  std::map<std::pair<int, int>, std::pair<std::size_t, bool>> iface;  // edge -> (curve edge, forward)
  const std::size_t n = tri.interface_loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int a = tri.interface_loop[i], b = tri.interface_loop[(i + 1) % n];
    iface[std::minmax(a, b)] = {i, a < b};
  }
  auto midpoint = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = mid.find({key.first, key.second});
    if (it != mid.end()) return it->second;
    Vec2 p = 0.5 * (tri.points[a] + tri.points[b]);
    if (auto f = iface.find({key.first, key.second}); f != iface.end()) p = curve.edge_point(f->second.first, 0.5);
    const int id = static_cast<int>(out.points.size());
    out.points.push_back(p);
    mid[{key.first, key.second}] = id;
    return id;
  };
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const auto [a, b, c] = tri.triangles[t];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    for (const auto& s : {std::array<int, 3>{a, ab, ca}, std::array<int, 3>{ab, b, bc},
                          std::array<int, 3>{ca, bc, c}, std::array<int, 3>{ab, bc, ca}}) {
      out.triangles.push_back(s);
      out.phase.push_back(tri.phase[t]);
    }
  }
  InterfaceCurve refined;
  for (std::size_t i = 0; i < n; ++i) {
    const int a = tri.interface_loop[i], b = tri.interface_loop[(i + 1) % n];
    out.interface_loop.push_back(a);
    out.interface_loop.push_back(midpoint(a, b));
    refined.vertices.push_back(out.points[a]);
    refined.vertices.push_back(out.points[out.interface_loop.back()]);
  }
  auto parent = curve.edge_point;
  refined.edge_point = [parent](std::size_t e, double s) { return parent(e / 2, 0.5 * (static_cast<double>(e % 2) + s)); };
  curve = std::move(refined);
  return out;
}

Mesh elevate(const Triangulation& tri, const InterfaceCurve& curve, int k) {
  if (k < 1 || k > 3) throw GeometryError("mesh degree must be 1, 2 or 3");
  const int nv = static_cast<int>(tri.points.size());
  std::vector<double> x;
  x.reserve(2 * nv);
  for (const auto& p : tri.points) {
    x.push_back(p.x());
    x.push_back(p.y());
  }
  std::map<std::pair<int, int>, std::pair<std::size_t, int>> iface;  // edge -> (curve edge, first vertex)
  const std::size_t n = tri.interface_loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int a = tri.interface_loop[i], b = tri.interface_loop[(i + 1) % n];
    iface[std::minmax(a, b)] = {i, a};
  }
  // Position at parameter s along edge (a -> b), on the curve for interface edges.
  auto edge_pos = [&](int a, int b, double s) -> Vec2 {
    auto it = iface.find(std::minmax(a, b));
    if (it == iface.end()) return (1.0 - s) * tri.points[a] + s * tri.points[b];
    return curve.edge_point(it->second.first, it->second.second == a ? s : 1.0 - s);
  };

  std::map<std::pair<int, int>, int> edge_first_node;
  const int npe = (k + 1) * (k + 2) / 2;
  std::vector<int> conn;
  conn.reserve(tri.triangles.size() * npe);
  static constexpr int kEdge[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (const auto& t : tri.triangles) {
    std::vector<int> nodes{t[0], t[1], t[2]};
    for (int le = 0; le < 3; ++le) {
      const int a = t[kEdge[le][0]], b = t[kEdge[le][1]];
      auto key = std::minmax(a, b);
      auto [it, inserted] = edge_first_node.try_emplace({key.first, key.second}, static_cast<int>(x.size() / 2));
      if (inserted)
        for (int j = 1; j < k; ++j) {
          const Vec2 p = edge_pos(key.first, key.second, double(j) / k);
          x.push_back(p.x());
          x.push_back(p.y());
        }
      for (int j = 1; j < k; ++j) nodes.push_back(a == key.first ? it->second + j - 1 : it->second + k - 1 - j);
    }
    if (k == 3) {
      Vec2 p = (tri.points[t[0]] + tri.points[t[1]] + tri.points[t[2]]) / 3.0;
      for (int le = 0; le < 3; ++le) {
        const int a = t[kEdge[le][0]], b = t[kEdge[le][1]];
        if (!iface.count(std::minmax(a, b))) continue;
        const Vec2 dev = edge_pos(a, b, 0.5) - 0.5 * (tri.points[a] + tri.points[b]);
        p += std::pow(2.0 / 3.0, k) * dev;
      }
      nodes.push_back(static_cast<int>(x.size() / 2));
      x.push_back(p.x());
      x.push_back(p.y());
    }
    conn.insert(conn.end(), nodes.begin(), nodes.end());
  }
  return Mesh(k, std::move(x), std::move(conn), tri.phase);
}

Mesh generate_fitted_mesh(const Rect& rect, const InterfaceCurve& curve, double h, int k) {
  if (k < 1 || k > 3) throw GeometryError("mesh degree must be 1, 2 or 3");
  return elevate(triangulate_fitted(rect, curve, h), curve, k);
}

namespace {
void check_bubble(const Rect& rect, const Vec2& c, double r, double h, int k) {
  if (!(h > 0.0)) throw GeometryError("mesh size must be positive");
  if (!(r > 0.0)) throw GeometryError("radius must be positive");
  if (k < 1 || k > 3) throw GeometryError("mesh degree must be 1, 2 or 3");
  const double gap = std::min({c.x() - rect.x0, rect.x1 - c.x(), c.y() - rect.y0, rect.y1 - c.y()}) - r;
  if (!(gap > h))
    throw GeometryError("circle exits rectangle: distance to boundary " + std::to_string(gap) +
                        " must exceed h = " + std::to_string(h));
}
int circle_segments(double r, double h) {
  return std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / h)));
}
}  // namespace

Mesh generate_bubble_mesh(const Rect& rect, const Vec2& center, double radius, double h, int k) {
  check_bubble(rect, center, radius, h, k);
  return generate_fitted_mesh(rect, circle_curve(center, radius, circle_segments(radius, h)), h, k);
}

std::vector<Mesh> generate_nested_bubble_meshes(const Rect& rect, const Vec2& center, double radius, double h,
                                                int k, int levels) {
  check_bubble(rect, center, radius, h, k);
  InterfaceCurve curve = circle_curve(center, radius, circle_segments(radius, h));
  Triangulation tri = triangulate_fitted(rect, curve, h);
  std::vector<Mesh> out;
  out.push_back(elevate(tri, curve, k));
  for (int l = 1; l < levels; ++l) {
    tri = refine_uniform(tri, curve);
    out.push_back(elevate(tri, curve, k));
  }
  return out;
}

Mesh generate_rectangle_mesh(const Rect& rect, int nx, int ny, int k) {
  if (nx < 1 || ny < 1) throw GeometryError("rectangle mesh needs at least one cell per direction");
  Triangulation tri;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      tri.points.emplace_back(rect.x0 + rect.width() * i / nx, rect.y0 + rect.height() * j / ny);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tri.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tri.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      tri.phase.push_back(Phase::Plus);
      tri.phase.push_back(Phase::Plus);
    }
  return elevate(tri, InterfaceCurve{}, k);
}

namespace {

// Curve edges bordering an element whose Jacobian falls below `bound` times
// that of its straight triangle.
std::vector<char> poorly_curved_edges(const Mesh& mesh, const Triangulation& tri, double bound) {
  std::map<std::pair<int, int>, std::size_t> iface;
  const std::size_t n = tri.interface_loop.size();
  for (std::size_t i = 0; i < n; ++i) iface[std::minmax(tri.interface_loop[i], tri.interface_loop[(i + 1) % n])] = i;
  std::vector<char> bad(n, 0);
  const auto& rule = triangle_rule(std::min(2 * mesh.degree() + 2, kMaxTriangleDegree));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto c = mesh.corners(e);
    const double affine = std::abs((c[1] - c[0]).x() * (c[2] - c[0]).y() - (c[1] - c[0]).y() * (c[2] - c[0]).x());
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : rule.points) worst = std::min(worst, element_map_unchecked(mesh, e, p).detJ / affine);
    if (worst >= bound) continue;
    const auto& t = tri.triangles[e];
    for (int le = 0; le < 3; ++le) {
      auto it = iface.find(std::minmax(t[le], t[(le + 1) % 3]));
      if (it != iface.end()) bad[it->second] = 1;
    }
  }
  return bad;
}

// Splits the marked edges at their parameter midpoint. Sub-arcs of a
// degree-k parametrization are again degree k, so the geometry is unchanged.
InterfaceCurve split_edges(const InterfaceCurve& curve, const std::vector<char>& marked) {
  struct Piece {
    std::size_t parent;
    double s0, s1;
  };
  auto pieces = std::make_shared<std::vector<Piece>>();
  InterfaceCurve out;
  for (std::size_t i = 0; i < curve.vertices.size(); ++i) {
    out.vertices.push_back(curve.vertices[i]);
    if (!marked[i]) {
      pieces->push_back({i, 0.0, 1.0});
      continue;
    }
    out.vertices.push_back(curve.edge_point(i, 0.5));
    pieces->push_back({i, 0.0, 0.5});
    pieces->push_back({i, 0.5, 1.0});
  }
  out.edge_point = [parent = curve.edge_point, pieces](std::size_t e, double s) {
    const Piece& p = (*pieces)[e];
    return parent(p.parent, p.s0 + (p.s1 - p.s0) * s);
  };
  return out;
}

}  // namespace

Mesh refit_mesh(const Mesh& mesh, const Rect& rect, double h) {
  constexpr double kMinRelativeJacobian = 0.2;
  InterfaceCurve curve = curve_from_mesh(mesh);
  // Lagrangian motion stretches parts of the interface far beyond h; such
  // edges are subdivided on the current curve before triangulating.
  for (int pass = 0; pass < 12; ++pass) {
    const std::size_t n = curve.vertices.size();
    std::vector<char> longer(n, 0);
    for (std::size_t i = 0; i < n; ++i) longer[i] = (curve.vertices[(i + 1) % n] - curve.vertices[i]).norm() > h;
    if (std::none_of(longer.begin(), longer.end(), [](char b) { return b; })) break;
    curve = split_edges(curve, longer);
  }
  for (int pass = 0;; ++pass) {
    const Triangulation tri = triangulate_fitted(rect, curve, h);
    Mesh out = elevate(tri, curve, mesh.degree());
    const auto bad = poorly_curved_edges(out, tri, kMinRelativeJacobian);
    if (std::none_of(bad.begin(), bad.end(), [](char b) { return b; })) return out;
    if (pass == 4) throw GeometryError("curved interface elements stay degenerate after splitting interface edges");
    curve = split_edges(curve, bad);
  }
}

}  // namespace alefem
