#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace alefem {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;

inline std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Fluid phase of an element. Plus is the ambient fluid, Minus the bubble.
enum class Phase : std::uint8_t { Plus = 0, Minus = 1 };

inline const char* to_string(Phase p) { return p == Phase::Plus ? "plus" : "minus"; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Infeasible geometry or a mesher that could not meet its quality bound.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Element map with non-positive Jacobian determinant.
class TangledElementError : public Error {
 public:
  TangledElementError(int element, double det)
      : Error("tangled element " + std::to_string(element) +
              " (detJ = " + std::to_string(det) + ")"),
        element_(element),
        det_(det) {}
  int element() const { return element_; }
  double det() const { return det_; }

 private:
  int element_;
  double det_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace alefem
