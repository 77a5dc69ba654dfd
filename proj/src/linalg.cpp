#include "alefem/linalg.hpp"

#include <Eigen/SparseLU>
#ifdef ALEFEM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>

namespace alefem {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct LUFactorization::Impl {
#ifdef ALEFEM_HAVE_UMFPACK
  Eigen::UmfPackLU<ColMatrix> lu;
#else
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  ColMatrix A;
};

LUFactorization::LUFactorization(const SparseMatrix& A) : impl_(std::make_unique<Impl>()), n_(A.rows()) {
  if (A.rows() != A.cols()) throw SolverError("LU needs a square matrix");
  impl_->A = ColMatrix(A);
  impl_->A.makeCompressed();
  impl_->lu.compute(impl_->A);
  if (impl_->lu.info() != Eigen::Success) {
#ifdef ALEFEM_HAVE_UMFPACK
    throw SolverError("LU factorization failed: singular or ill-conditioned matrix of size " +
                      std::to_string(n_));
#else
    throw SolverError("LU factorization failed: " + impl_->lu.lastErrorMessage());
#endif
  }
}

LUFactorization::~LUFactorization() = default;
LUFactorization::LUFactorization(LUFactorization&&) noexcept = default;
LUFactorization& LUFactorization::operator=(LUFactorization&&) noexcept = default;

Vector LUFactorization::solve(const Vector& b) const {
  if (b.size() != n_) throw SolverError("right-hand side size mismatch");
  Vector x = impl_->lu.solve(b);
  // one step of iterative refinement
  const Vector r = b - impl_->A * x;
  x += impl_->lu.solve(r);
  if (!x.allFinite()) throw SolverError("LU solve produced non-finite values");
  return x;
}

namespace {
double inf_norm(const SparseMatrix& A) {
  double m = 0.0;
  for (int i = 0; i < A.outerSize(); ++i) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b) {
  const double r = (A * x - b).lpNorm<Eigen::Infinity>();
  const double scale = inf_norm(A) * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? r / scale : r;
}
}  // namespace

Vector lu_solve(const SparseMatrix& A, const Vector& b) {
  LUFactorization lu(A);
  Vector x = lu.solve(b);
  const double res = relative_residual(A, x, b);
  if (!(res <= 1e-10)) throw SolverError("LU residual " + std::to_string(res) + " above tolerance");
  return x;
}

void apply_dirichlet(SparseMatrix& A, Vector& b, const std::vector<int>& dofs, const Vector& values) {
  const int n = A.rows();
  std::vector<char> fixed(n, 0);
  Vector val = Vector::Zero(n);
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    fixed[dofs[i]] = 1;
    val[dofs[i]] = values[i];
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(A.nonZeros());
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) {
      trip.emplace_back(i, i, 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      if (fixed[it.col()]) b[i] -= it.value() * val[it.col()];
      else trip.emplace_back(i, it.col(), it.value());
    }
  }
  for (int i = 0; i < n; ++i)
    if (fixed[i]) b[i] = val[i];
  SparseMatrix out(n, A.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  A = std::move(out);
}

// The bordered system is solved by deflation: constants span the kernel of
// the pressure-gradient block, so the multiplier follows from compatibility,
// one pressure DOF is pinned for the factorization and the result is shifted
// to zero mean afterwards. This avoids factoring the dense mean row.
SaddleSolution solve_saddle(const SaddleSystem& sys) {
  const int nu = sys.Kuu.rows();
  const int np = sys.B.rows();
  if (sys.Kuu.cols() != nu || sys.B.cols() != nu || sys.rhs_u.size() != nu || sys.rhs_p.size() != np)
    throw SolverError("saddle system dimensions are inconsistent");
  const bool constrained = sys.mean.size() > 0;
  if (constrained && sys.mean.size() != np) throw SolverError("mean vector size mismatch");
  if (sys.dirichlet_values.size() != static_cast<Eigen::Index>(sys.dirichlet_dofs.size()))
    throw SolverError("Dirichlet value count mismatch");
  const int n = nu + np;

  std::vector<char> fixed(nu, 0);
  Vector val = Vector::Zero(nu);
  for (std::size_t i = 0; i < sys.dirichlet_dofs.size(); ++i) {
    fixed[sys.dirichlet_dofs[i]] = 1;
    val[sys.dirichlet_dofs[i]] = sys.dirichlet_values[i];
  }

  Vector rhs = Vector::Zero(n);
  rhs.head(nu) = sys.rhs_u;
  rhs.segment(nu, np) = sys.rhs_p;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.Kuu.nonZeros() + 2 * sys.B.nonZeros() + 1);
  for (int i = 0; i < nu; ++i) {
    if (fixed[i]) {
      trip.emplace_back(i, i, 1.0);
      rhs[i] = val[i];
      continue;
    }
    for (SparseMatrix::InnerIterator it(sys.Kuu, i); it; ++it) {
      if (fixed[it.col()]) rhs[i] -= it.value() * val[it.col()];
      else trip.emplace_back(i, it.col(), it.value());
    }
  }
  const int pinned = constrained && np > 0 ? 0 : -1;
  for (int p = 0; p < np; ++p) {
    for (SparseMatrix::InnerIterator it(sys.B, p); it; ++it) {
      const int j = it.col();
      if (fixed[j]) {
        rhs[nu + p] -= it.value() * val[j];
      } else {
        if (p != pinned) trip.emplace_back(nu + p, j, it.value());
        trip.emplace_back(j, nu + p, it.value());
      }
    }
  }
  SaddleSolution sol;
  if (pinned >= 0) {
    const double total = sys.mean.sum();
    if (!(std::abs(total) > 0.0)) throw SolverError("mean vector integrates to zero");
    sol.multiplier = -rhs.segment(nu, np).sum() / total;
    rhs.segment(nu, np) -= sol.multiplier * sys.mean;
    trip.emplace_back(nu + pinned, nu + pinned, 1.0);
    rhs[nu + pinned] = 0.0;
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();

  LUFactorization lu(K);
  Vector x = lu.solve(rhs);
  sol.u = x.head(nu);
  for (int i = 0; i < nu; ++i)
    if (fixed[i]) sol.u[i] = val[i];
  sol.p = x.segment(nu, np);
  if (pinned >= 0) sol.p.array() -= sys.mean.dot(sol.p) / sys.mean.sum();

  // Residual of the original bordered system.
  const Vector ru = sys.Kuu * sol.u + sys.B.transpose() * sol.p - sys.rhs_u;
  Vector rp = sys.B * sol.u - sys.rhs_p;
  if (constrained) rp += sol.multiplier * sys.mean;
  double r = 0.0;
  for (int i = 0; i < nu; ++i)
    if (!fixed[i]) r = std::max(r, std::abs(ru[i]));
  r = std::max(r, rp.lpNorm<Eigen::Infinity>());
  if (constrained) r = std::max(r, std::abs(sys.mean.dot(sol.p)));
  const double scale = std::max(inf_norm(sys.Kuu), inf_norm(sys.B)) *
                           std::max(sol.u.lpNorm<Eigen::Infinity>(), sol.p.lpNorm<Eigen::Infinity>()) +
                       std::max(sys.rhs_u.lpNorm<Eigen::Infinity>(), sys.rhs_p.lpNorm<Eigen::Infinity>());
  sol.residual = scale > 0.0 ? r / scale : r;
  if (!(sol.residual <= 1e-10))
    throw SolverError("saddle-point residual " + std::to_string(sol.residual) + " above tolerance");
  return sol;
}

}  // namespace alefem
