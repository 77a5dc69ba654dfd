#include "alefem/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <mutex>
#include <string>

namespace alefem {
namespace {

// Jacobi polynomial P_n^{(a,b)} and its derivative on [-1, 1].
void jacobi(int n, double a, double b, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  if (n == 0) {
    p = p0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // d/dx P_n^{(a,b)} = (n + a + b + 1)/2 * P_{n-1}^{(a+1,b+1)}
  double q = 0.0, dq = 0.0;
  jacobi(n - 1, a + 1.0, b + 1.0, x, q, dq);
  dp = 0.5 * (n + a + b + 1.0) * q;
}

// Gauss-Jacobi rule on [-1, 1] for weight (1-x)^a (1+x)^b. Golub-Welsch for
// the starting values, then Newton polishing on the Jacobi polynomial.
void gauss_jacobi(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double k = i;
    const double s = 2.0 * k + a + b;
    T(i, i) = (s == 0.0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (i + 1 < n) {
      const double k1 = k + 1.0;
      const double s1 = 2.0 * k1 + a + b;
      T(i, i + 1) = T(i + 1, i) =
          std::sqrt(4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
                     std::tgamma(a + b + 2.0);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double xi = eig.eigenvalues()(i);
    for (int it = 0; it < 5; ++it) {
      double p, dp;
      jacobi(n, a, b, xi, p, dp);
      xi -= p / dp;
    }
    x[i] = xi;
  }
  // Weights from the Christoffel-Darboux form, consistent with polished nodes.
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double p, dp;
    jacobi(n, a, b, x[i], p, dp);
    w[i] = 1.0 / ((1.0 - x[i] * x[i]) * dp * dp);
    sum += w[i];
  }
  for (double& wi : w) wi *= mu0 / sum;
}

QuadRule make_triangle_rule(int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  std::vector<double> xa, wa, xb, wb;
  gauss_jacobi(n, 1.0, 0.0, xa, wa);  // collapsed direction, weight (1 - u)
  gauss_jacobi(n, 0.0, 0.0, xb, wb);
  QuadRule r;
  r.exact_degree = degree;
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (1.0 + xa[i]);
    const double wu = wa[i] / 4.0;  // (1-u) du on [0,1] from (1-x) dx on [-1,1]
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (1.0 + xb[j]);
      r.points.emplace_back(u, v * (1.0 - u));
      r.weights.push_back(wu * 0.5 * wb[j]);
    }
  }
  return r;
}

QuadRule make_edge_rule(int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  std::vector<double> x, w;
  gauss_legendre01(n, x, w);
  QuadRule r;
  r.exact_degree = degree;
  for (int i = 0; i < n; ++i) {
    r.points.emplace_back(x[i], 0.0);
    r.weights.push_back(w[i]);
  }
  return r;
}

}  // namespace

void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  gauss_jacobi(n, 0.0, 0.0, nodes, weights);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (1.0 + nodes[i]);
    weights[i] *= 0.5;
  }
}

const QuadRule& triangle_rule(int exact_degree) {
  if (exact_degree < 0 || exact_degree > kMaxTriangleDegree)
    throw std::out_of_range("triangle_rule: degree " + std::to_string(exact_degree) +
                            " outside [0, " + std::to_string(kMaxTriangleDegree) + "]");
  static std::array<QuadRule, kMaxTriangleDegree + 1> rules;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 0; d <= kMaxTriangleDegree; ++d) rules[d] = make_triangle_rule(d);
  });
  return rules[exact_degree];
}

const QuadRule& edge_rule(int exact_degree) {
  if (exact_degree < 0 || exact_degree > kMaxEdgeDegree)
    throw std::out_of_range("edge_rule: degree " + std::to_string(exact_degree) + " outside [0, " +
                            std::to_string(kMaxEdgeDegree) + "]");
  static std::array<QuadRule, kMaxEdgeDegree + 1> rules;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 0; d <= kMaxEdgeDegree; ++d) rules[d] = make_edge_rule(d);
  });
  return rules[exact_degree];
}

}  // namespace alefem
