#include "alefem/reference_element.hpp"

#include <array>
#include <cmath>
#include <mutex>

namespace alefem {
namespace {

constexpr std::array<std::array<int, 2>, 3> kEdges{{{0, 1}, {1, 2}, {2, 0}}};

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

Vec2 ReferenceElement::edge_point(int e, double s) {
  static const std::array<Vec2, 3> v{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  return (1.0 - s) * v[kEdges[e][0]] + s * v[kEdges[e][1]];
}

ReferenceElement::ReferenceElement(int degree, Kind kind) : degree_(degree), kind_(kind) {
  const int k = degree;
  nodes_ = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  for (int e = 0; e < 3; ++e)
    for (int j = 1; j < k; ++j) nodes_.push_back(edge_point(e, double(j) / k));
  for (int j = 1; j < k; ++j)
    for (int i = 1; i + j < k; ++i) nodes_.emplace_back(double(i) / k, double(j) / k);

  for (int d = 0; d <= k; ++d)
    for (int b = 0; b <= d; ++b) monomials_.emplace_back(d - b, b);

  const int n = static_cast<int>(nodes_.size());
  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      V(i, m) = ipow(nodes_[i].x(), monomials_[m].first) * ipow(nodes_[i].y(), monomials_[m].second);
  // Column j of coeffs_ holds the monomial coefficients of basis function j.
  coeffs_ = V.fullPivLu().inverse();

  if (kind == Kind::MiniBubble) nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
}

const ReferenceElement& ReferenceElement::lagrange(int degree) {
  if (degree < 1 || degree > 3)
    throw std::out_of_range("ReferenceElement: degree " + std::to_string(degree) + " not in [1,3]");
  static std::array<const ReferenceElement*, 4> table{};
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 1; d <= 3; ++d) table[d] = new ReferenceElement(d, Kind::Lagrange);
  });
  return *table[degree];
}

const ReferenceElement& ReferenceElement::mini() {
  static const ReferenceElement* e = new ReferenceElement(1, Kind::MiniBubble);
  return *e;
}

std::vector<int> ReferenceElement::edge_nodes(int e) const {
  std::vector<int> out{kEdges[e][0], kEdges[e][1]};
  for (int j = 0; j < degree_ - 1; ++j) out.push_back(3 + e * (degree_ - 1) + j);
  return out;
}

void ReferenceElement::values(const Vec2& p, std::span<double> out) const {
  const int n = static_cast<int>(monomials_.size());
  double mono[10];
  for (int m = 0; m < n; ++m)
    mono[m] = ipow(p.x(), monomials_[m].first) * ipow(p.y(), monomials_[m].second);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) s += coeffs_(m, j) * mono[m];
    out[j] = s;
  }
  if (kind_ == Kind::MiniBubble) out[3] = 27.0 * (1.0 - p.x() - p.y()) * p.x() * p.y();
}

void ReferenceElement::gradients(const Vec2& p, std::span<Vec2> out) const {
  const int n = static_cast<int>(monomials_.size());
  double dx[10], dy[10];
  for (int m = 0; m < n; ++m) {
    const auto [a, b] = monomials_[m];
    dx[m] = a == 0 ? 0.0 : a * ipow(p.x(), a - 1) * ipow(p.y(), b);
    dy[m] = b == 0 ? 0.0 : b * ipow(p.x(), a) * ipow(p.y(), b - 1);
  }
  for (int j = 0; j < n; ++j) {
    double gx = 0.0, gy = 0.0;
    for (int m = 0; m < n; ++m) {
      gx += coeffs_(m, j) * dx[m];
      gy += coeffs_(m, j) * dy[m];
    }
    out[j] = Vec2(gx, gy);
  }
  if (kind_ == Kind::MiniBubble) {
    const double x = p.x(), y = p.y();
    out[3] = Vec2(27.0 * y * (1.0 - 2.0 * x - y), 27.0 * x * (1.0 - x - 2.0 * y));
  }
}

}  // namespace alefem
