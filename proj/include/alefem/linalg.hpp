#pragma once

#include "alefem/assembly.hpp"

#include <memory>
#include <vector>

namespace alefem {

/// Sparse LU with partial pivoting and a fill-reducing column ordering.
/// Immutable after construction; solve() may be called repeatedly.
class LUFactorization {
 public:
  explicit LUFactorization(const SparseMatrix& A);
  ~LUFactorization();
  LUFactorization(LUFactorization&&) noexcept;
  LUFactorization& operator=(LUFactorization&&) noexcept;

  Vector solve(const Vector& b) const;
  int size() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

/// Solves A x = b and checks ||Ax - b||_inf <= 1e-10 (||A||_inf ||x||_inf + ||b||_inf).
Vector lu_solve(const SparseMatrix& A, const Vector& b);

/// Symmetric elimination of Dirichlet rows: row and column i are replaced by
/// the identity and the known values are moved to the right-hand side.
void apply_dirichlet(SparseMatrix& A, Vector& b, const std::vector<int>& dofs, const Vector& values);

/// [[Kuu, B^T, 0], [B, 0, m], [0, m^T, 0]] (u, p, lambda) = (rhs_u, rhs_p, 0),
/// with Dirichlet velocity rows u[dofs] = values. `mean` may be empty when
/// no zero-mean constraint is imposed.
struct SaddleSystem {
  SparseMatrix Kuu;
  SparseMatrix B;
  Vector rhs_u, rhs_p;
  Vector mean;
  std::vector<int> dirichlet_dofs;
  Vector dirichlet_values;
};

struct SaddleSolution {
  Vector u, p;
  double multiplier = 0.0;
  double residual = 0.0;  // relative infinity-norm residual of the full system
};

SaddleSolution solve_saddle(const SaddleSystem& sys);

}  // namespace alefem
