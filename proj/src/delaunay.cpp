#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

namespace alefem::detail {

ConstrainedDelaunay::ConstrainedDelaunay(const Vec2& lo, const Vec2& hi) {
  const Vec2 c = 0.5 * (lo + hi);
  const double r = (hi - lo).norm() * 50.0 + 1.0;
  scale_ = (hi - lo).norm();
  pts_ = {c + Vec2(-2.0 * r, -r), c + Vec2(2.0 * r, -r), c + Vec2(0.0, 2.0 * r)};
  tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
}

double ConstrainedDelaunay::orient(int a, int b, int c) const { return orient(a, b, pts_[c]); }

double ConstrainedDelaunay::orient(int a, int b, const Vec2& p) const {
  const Vec2 u = pts_[b] - pts_[a], v = p - pts_[a];
  return u.x() * v.y() - u.y() * v.x();
}

bool ConstrainedDelaunay::in_circle(int t, const Vec2& p) const {
  const auto& v = tris_[t].v;
  const Vec2 a = pts_[v[0]] - p, b = pts_[v[1]] - p, c = pts_[v[2]] - p;
  const double det = (a.squaredNorm()) * (b.x() * c.y() - c.x() * b.y()) -
                     (b.squaredNorm()) * (a.x() * c.y() - c.x() * a.y()) +
                     (c.squaredNorm()) * (a.x() * b.y() - b.x() * a.y());
  const double tol = 1e-12 * scale_ * scale_ * scale_ * scale_;
  return det > tol;
}

bool ConstrainedDelaunay::touches_super(int t) const {
  const auto& v = tris_[t].v;
  return v[0] < 3 || v[1] < 3 || v[2] < 3;
}

int ConstrainedDelaunay::locate(const Vec2& p) {
  int t = (last_ < static_cast<int>(tris_.size()) && tris_[last_].alive) ? last_ : -1;
  if (t < 0)
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i)
      if (tris_[i].alive) {
        t = i;
        break;
      }
  for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
    const auto& tr = tris_[t];
    int next = -1;
    for (int i = 0; i < 3; ++i)
      if (orient(tr.v[i], tr.v[(i + 1) % 3], p) < 0.0) {
        next = tr.nb[i];
        break;
      }
    if (next < 0) return t;
    t = next;
  }
  for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
    if (!tris_[i].alive) continue;
    const auto& v = tris_[i].v;
    if (orient(v[0], v[1], p) >= 0 && orient(v[1], v[2], p) >= 0 && orient(v[2], v[0], p) >= 0) return i;
  }
  throw GeometryError("delaunay: point location failed");
}

void ConstrainedDelaunay::set_back_pointer(int n, int old_t, int new_t) {
  if (n < 0) return;
  for (int i = 0; i < 3; ++i)
    if (tris_[n].nb[i] == old_t) {
      tris_[n].nb[i] = new_t;
      return;
    }
}

int ConstrainedDelaunay::insert(const Vec2& p) { return insert(p, true); }

int ConstrainedDelaunay::try_insert(const Vec2& p) { return insert(p, false); }

int ConstrainedDelaunay::insert(const Vec2& p, bool strict) {
  const int pi = static_cast<int>(pts_.size());
  pts_.push_back(p);
  const int t0 = locate(p);

  std::vector<int> cavity{t0};
  std::vector<char> in_cavity(tris_.size(), 0);
  in_cavity[t0] = 1;
  for (std::size_t k = 0; k < cavity.size(); ++k) {
    const auto& tr = tris_[cavity[k]];
    for (int i = 0; i < 3; ++i) {
      const int n = tr.nb[i];
      if (n < 0 || in_cavity[n]) continue;
      if (is_constrained(tr.v[i], tr.v[(i + 1) % 3])) continue;
      if (in_circle(n, p)) {
        in_cavity[n] = 1;
        cavity.push_back(n);
      }
    }
  }

  struct Boundary {
    int a, b, outside;
  };
  std::vector<Boundary> boundary;
  // Shrink the cavity until p sees every boundary edge; constraints can make
  // the circumcircle test alone produce a cavity that is not star-shaped.
  for (;;) {
    boundary.clear();
    bool shrunk = false;
    for (int t : cavity) {
      const auto& tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n >= 0 && in_cavity[n]) continue;
        if (t != t0 && orient(tr.v[i], tr.v[(i + 1) % 3], pi) <= 0.0) {
          in_cavity[t] = 0;
          shrunk = true;
          break;
        }
        boundary.push_back({tr.v[i], tr.v[(i + 1) % 3], n});
      }
    }
    if (!shrunk) break;
    std::vector<int> kept{t0};
    std::vector<char> reached(tris_.size(), 0);
    reached[t0] = 1;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const auto& tr = tris_[kept[k]];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n < 0 || !in_cavity[n] || reached[n] || is_constrained(tr.v[i], tr.v[(i + 1) % 3])) continue;
        reached[n] = 1;
        kept.push_back(n);
      }
    }
    for (int t : cavity) in_cavity[t] = reached[t];
    cavity = std::move(kept);
  }
  for (const auto& be : boundary)
    if (orient(be.a, be.b, pi) <= 0.0) {
      if (strict) throw GeometryError("delaunay: degenerate cavity while inserting point " + std::to_string(pi - 3));
      pts_.pop_back();
      return -1;
    }
  for (int t : cavity) {
    tris_[t].alive = false;
    free_.push_back(t);
  }

  std::map<int, int> starting_at, ending_at;
  std::vector<int> created;
  for (const auto& be : boundary) {
    int t;
    if (!free_.empty()) {
      t = free_.back();
      free_.pop_back();
    } else {
      t = static_cast<int>(tris_.size());
      tris_.emplace_back();
    }
    tris_[t] = Tri{{be.a, be.b, pi}, {be.outside, -1, -1}, true};
    if (be.outside >= 0) {
      auto& on = tris_[be.outside];
      for (int i = 0; i < 3; ++i)
        if (on.v[i] == be.b && on.v[(i + 1) % 3] == be.a) on.nb[i] = t;
    }
    starting_at[be.a] = t;
    ending_at[be.b] = t;
    created.push_back(t);
  }
  for (int t : created) {
    auto& tr = tris_[t];
    tr.nb[1] = starting_at.at(tr.v[1]);  // edge (b, p) borders the triangle starting at b
    tr.nb[2] = ending_at.at(tr.v[0]);    // edge (p, a) borders the triangle ending at a
  }
  last_ = created.front();
  return pi - 3;
}

bool ConstrainedDelaunay::has_edge(int a, int b, int* tri, int* idx) const {
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive) continue;
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i)
      if (v[i] == a && v[(i + 1) % 3] == b) {
        if (tri) *tri = t;
        if (idx) *idx = i;
        return true;
      }
  }
  return false;
}

bool ConstrainedDelaunay::segments_cross(int a, int b, int c, int d) const {
  if (a == c || a == d || b == c || b == d) return false;
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

int ConstrainedDelaunay::opposite_index(int u, int a, int b) const {
  const auto& v = tris_[u].v;
  for (int j = 0; j < 3; ++j)
    if (v[j] == a && v[(j + 1) % 3] == b) return j;
  return -1;
}

bool ConstrainedDelaunay::flippable(int t, int i) const {
  const int u = tris_[t].nb[i];
  if (u < 0) return false;
  const auto& v = tris_[t].v;
  const int a = v[i], b = v[(i + 1) % 3], c = v[(i + 2) % 3];
  const int j = opposite_index(u, b, a);
  const int d = tris_[u].v[(j + 2) % 3];
  return orient(a, d, c) > 0.0 && orient(d, b, c) > 0.0;
}

void ConstrainedDelaunay::flip(int t, int i) {
  const int u = tris_[t].nb[i];
  const auto tv = tris_[t].v;
  const auto tn = tris_[t].nb;
  const int a = tv[i], b = tv[(i + 1) % 3], c = tv[(i + 2) % 3];
  const int j = opposite_index(u, b, a);
  const auto uv = tris_[u].v;
  const auto un = tris_[u].nb;
  const int d = uv[(j + 2) % 3];
  const int n_bc = tn[(i + 1) % 3], n_ca = tn[(i + 2) % 3];
  const int n_ad = un[(j + 1) % 3], n_db = un[(j + 2) % 3];
  tris_[t] = Tri{{a, d, c}, {n_ad, u, n_ca}, true};
  tris_[u] = Tri{{d, b, c}, {n_db, n_bc, t}, true};
  set_back_pointer(n_ad, u, t);
  set_back_pointer(n_bc, t, u);
}

void ConstrainedDelaunay::constrain(int ea, int eb) {
  const int a = ea + 3, b = eb + 3;
  constrained_.insert(std::minmax(a, b));
  if (has_edge(a, b) || has_edge(b, a)) return;

  std::deque<std::pair<int, int>> crossing;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive) continue;
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i) {
      const int c = v[i], d = v[(i + 1) % 3];
      if (c < d && segments_cross(a, b, c, d)) crossing.emplace_back(c, d);
    }
  }
  std::size_t guard = 0;
  while (!crossing.empty()) {
    if (++guard > 100000) throw GeometryError("delaunay: constraint recovery did not terminate");
    auto [c, d] = crossing.front();
    crossing.pop_front();
    int t, i;
    if (!has_edge(c, d, &t, &i) && !has_edge(d, c, &t, &i)) continue;
    if (is_constrained(c, d))
      throw GeometryError("delaunay: intersecting constraints (" + std::to_string(a - 3) + "," +
                          std::to_string(b - 3) + ")");
    if (!flippable(t, i)) {
      crossing.emplace_back(c, d);
      continue;
    }
    flip(t, i);
    // the new diagonal is (d', c') = tris_[t].v[1], tris_[t].v[2]
    const int p = tris_[t].v[1], q = tris_[t].v[2];
    if (segments_cross(a, b, p, q)) crossing.emplace_back(std::min(p, q), std::max(p, q));
  }
  if (!has_edge(a, b) && !has_edge(b, a))
    throw GeometryError("delaunay: failed to recover segment (" + std::to_string(ea) + "," +
                        std::to_string(eb) + ")");
}

void ConstrainedDelaunay::legalize() {
  for (int pass = 0; pass < 200; ++pass) {
    bool changed = false;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive || touches_super(t)) continue;
      for (int i = 0; i < 3; ++i) {
        const int u = tris_[t].nb[i];
        if (u < 0 || touches_super(u)) continue;
        const int a = tris_[t].v[i], b = tris_[t].v[(i + 1) % 3];
        if (is_constrained(a, b)) continue;
        const int j = opposite_index(u, b, a);
        const int d = tris_[u].v[(j + 2) % 3];
        if (in_circle(t, pts_[d]) && flippable(t, i)) {
          flip(t, i);
          changed = true;
          break;
        }
      }
    }
    if (!changed) return;
  }
}

void ConstrainedDelaunay::smooth(const std::vector<char>& fixed, int sweeps) {
  const int n = static_cast<int>(pts_.size());
  for (int s = 0; s < sweeps; ++s) {
    std::vector<std::vector<int>> incident(n);
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (tris_[t].alive && !touches_super(t))
        for (int v : tris_[t].v) incident[v].push_back(t);
    for (int v = 3; v < n; ++v) {
      if (fixed[v - 3] || incident[v].empty()) continue;
      Vec2 sum = Vec2::Zero();
      int count = 0;
      for (int t : incident[v])
        for (int w : tris_[t].v)
          if (w != v) {
            sum += pts_[w];
            ++count;
          }
      const Vec2 old = pts_[v];
      pts_[v] = sum / count;
      bool ok = true;
      for (int t : incident[v]) {
        const auto& tv = tris_[t].v;
        if (orient(tv[0], tv[1], tv[2]) <= 1e-6 * scale_ * scale_ * 1e-3) ok = false;
      }
      if (!ok) pts_[v] = old;
    }
    legalize();
  }
}

std::vector<std::array<int, 3>> ConstrainedDelaunay::triangles() const {
  std::vector<std::array<int, 3>> out;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
    if (!tris_[t].alive || touches_super(t)) continue;
    const auto& v = tris_[t].v;
    out.push_back({v[0] - 3, v[1] - 3, v[2] - 3});
  }
  return out;
}

}  // namespace alefem::detail
