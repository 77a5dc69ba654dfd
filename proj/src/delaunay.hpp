#pragma once

// Incremental constrained Delaunay triangulation (Bowyer-Watson insertion,
// Sloan-style constraint recovery, Lawson legalization). Internal to the mesher.

#include "alefem/common.hpp"

#include <array>
#include <set>
#include <utility>
#include <vector>

namespace alefem::detail {

class ConstrainedDelaunay {
 public:
  ConstrainedDelaunay(const Vec2& lo, const Vec2& hi);

  /// Inserts p and returns its index (0-based, excluding the super vertices).
  int insert(const Vec2& p);
  /// Like insert, but leaves the triangulation unchanged and returns -1 when p is degenerate.
  int try_insert(const Vec2& p);
  /// Forces segment (a, b) into the triangulation and marks it constrained.
  void constrain(int a, int b);
  void legalize();
  /// Laplacian smoothing of vertices not marked fixed, with legalization.
  void smooth(const std::vector<char>& fixed, int sweeps);

  const Vec2& point(int i) const { return pts_[i + 3]; }
  int num_points() const { return static_cast<int>(pts_.size()) - 3; }
  /// Triangles not touching the super triangle, counter-clockwise.
  std::vector<std::array<int, 3>> triangles() const;

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // nb[i] lies across edge (v[i], v[i+1])
    bool alive = true;
  };

  int insert(const Vec2& p, bool strict);
  double orient(int a, int b, int c) const;
  double orient(int a, int b, const Vec2& p) const;
  bool in_circle(int t, const Vec2& p) const;
  int locate(const Vec2& p);
  bool is_constrained(int a, int b) const { return constrained_.count(std::minmax(a, b)) > 0; }
  bool has_edge(int a, int b, int* tri = nullptr, int* idx = nullptr) const;
  bool segments_cross(int a, int b, int c, int d) const;
  bool flippable(int t, int i) const;
  void flip(int t, int i);
  void set_back_pointer(int n, int old_t, int new_t);
  int opposite_index(int u, int a, int b) const;
  bool touches_super(int t) const;

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::set<std::pair<int, int>> constrained_;
  int last_ = 0;
  double scale_;
};

}  // namespace alefem::detail
