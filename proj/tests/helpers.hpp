#pragma once

#include "alefem/linalg.hpp"
#include "alefem/quadrature.hpp"
#include "alefem/verify.hpp"

#include <cmath>
#include <random>

namespace testing {

using namespace alefem;

inline PhaseParams bp1() { return PhaseParams{1000.0, 100.0, 10.0, 1.0, 0.98}; }

inline Mesh unit_square(int n, int k) { return generate_rectangle_mesh(Rect{0.0, 0.0, 1.0, 1.0}, n, n, k); }

inline Mesh bubble(double h, int k) { return generate_bubble_mesh(Rect{}, {0.5, 0.5}, 0.25, h, k); }

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = scale * dist(rng);
  return v;
}

// Reference point in the interior of the unit triangle.
inline Vec2 random_reference_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double a = dist(rng), b = dist(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return {a, b};
}

}  // namespace testing
