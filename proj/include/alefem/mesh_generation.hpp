#pragma once

#include "alefem/mesh.hpp"

#include <functional>
#include <vector>

namespace alefem {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 2.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// Closed interface curve given as a counter-clockwise polygon plus a
/// parametrization of each edge: edge_point(i, 0) == vertices[i] and
/// edge_point(i, 1) == vertices[(i + 1) % n].
struct InterfaceCurve {
  std::vector<Vec2> vertices;
  std::function<Vec2(std::size_t edge, double s)> edge_point;
};

/// Regular polygon on a circle; edge points are arc-equidistant.
InterfaceCurve circle_curve(const Vec2& center, double radius, int segments);
InterfaceCurve ellipse_curve(const Vec2& center, double a, double b, int segments);
/// Upper half disk: arc from angle 0 to pi followed by the diameter.
InterfaceCurve half_disk_curve(const Vec2& center, double radius, int arc_segments, int diameter_segments);
/// The current interface of a mesh, reusing its nodes verbatim.
InterfaceCurve curve_from_mesh(const Mesh& mesh);

/// Straight triangulation with phase labels. interface_loop lists the
/// point ids of the interface polygon in curve order.
struct Triangulation {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Phase> phase;
  std::vector<int> interface_loop;
};

/// Quality triangulation of `rect` conforming to the polygon of `curve`
/// (minus phase inside). Throws GeometryError if the polygon is not
/// strictly inside the rectangle or the angle bound pi/18 cannot be met.
Triangulation triangulate_fitted(const Rect& rect, const InterfaceCurve& curve, double h);

/// Red refinement; interface midpoints are placed with curve.edge_point(i, 1/2).
/// `curve` is updated to the refined polygon.
Triangulation refine_uniform(const Triangulation& tri, InterfaceCurve& curve);

/// Degree-k isoparametric mesh; nodes of interface edges are placed on the curve.
Mesh elevate(const Triangulation& tri, const InterfaceCurve& curve, int k);

/// Fitted mesh for a circular bubble. Interface nodes lie on the circle.
Mesh generate_bubble_mesh(const Rect& rect, const Vec2& center, double radius, double h, int k);
Mesh generate_fitted_mesh(const Rect& rect, const InterfaceCurve& curve, double h, int k);

/// Coarse bubble mesh of size h followed by levels-1 red refinements.
std::vector<Mesh> generate_nested_bubble_meshes(const Rect& rect, const Vec2& center, double radius,
                                                double h, int k, int levels);

/// Structured single-phase mesh (all elements plus, no interface).
Mesh generate_rectangle_mesh(const Rect& rect, int nx, int ny, int k);

/// New fitted mesh of the current geometry of `mesh` with target size h.
Mesh refit_mesh(const Mesh& mesh, const Rect& rect, double h);

}  // namespace alefem
