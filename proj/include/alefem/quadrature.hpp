#pragma once

#include "alefem/common.hpp"

#include <vector>

namespace alefem {

/// Quadrature rule on the reference triangle {x, y >= 0, x + y <= 1} or on
/// the reference edge [0, 1]. Edge rules store their abscissae in `points[i].x()`.
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxTriangleDegree = 12;
inline constexpr int kMaxEdgeDegree = 41;

/// Collapsed (Duffy) product of Gauss-Jacobi and Gauss-Legendre rules.
/// Weights are positive and sum to 1/2. Throws std::out_of_range for
/// degrees outside [0, kMaxTriangleDegree].
const QuadRule& triangle_rule(int exact_degree);

/// Gauss-Legendre on [0, 1]; weights sum to 1.
const QuadRule& edge_rule(int exact_degree);

/// Gauss-Legendre nodes/weights on [0, 1] with n points.
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace alefem
