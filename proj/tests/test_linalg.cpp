#include "helpers.hpp"

#include <doctest.h>

using namespace testing;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& D) { return D.sparseView(); }

// Stokes system on a unit-square mesh with velocity boundary data from `u_exact`.
SaddleSystem stokes(const Mesh& m, const FESpacePair& sp, const VectorField& u_exact,
                    const std::function<Vec2(const Vec2&)>& f) {
  SaddleSystem sys;
  const PhaseParams unit{1.0, 1.0, 1.0, 1.0, 0.0};
  sys.Kuu = assemble(MatrixKind::A_mu, m, sp, unit);
  sys.B = assemble(MatrixKind::C, m, sp, unit);
  sys.B *= -1.0;
  sys.rhs_u = assemble_load(m, sp, unit, false, f);
  sys.rhs_p = Vector::Zero(sp.num_pressure());
  sys.mean = mean_vector(m, sp.pressure);
  const Vector ue = interpolate_vector(sp.velocity, m, u_exact);
  for (int d : sp.boundary_dofs)
    for (int c = 0; c < 2; ++c) sys.dirichlet_dofs.push_back(2 * d + c);
  sys.dirichlet_values.resize(static_cast<Eigen::Index>(sys.dirichlet_dofs.size()));
  for (std::size_t i = 0; i < sys.dirichlet_dofs.size(); ++i) sys.dirichlet_values[i] = ue[sys.dirichlet_dofs[i]];
  return sys;
}

}  // namespace

TEST_CASE("LU on small examples") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
  const Vector b = Vector::LinSpaced(5, 1.0, 5.0);
  CHECK(lu_solve(from_dense(I), b) == b);

  Eigen::MatrixXd D(2, 2);
  D << 2, 0, 0, 4;
  const Vector x = lu_solve(from_dense(D), Vector::Constant(2, 2.0));
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(0.5));

  CHECK(lu_solve(from_dense(D), Vector::Zero(2)).isZero(0.0));
}

TEST_CASE("LU on a random SPD system") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd R(200, 200);
  for (int j = 0; j < 200; ++j) R.col(j) = random_vector(rng, 200);
  const Eigen::MatrixXd A = R * R.transpose() + 200.0 * Eigen::MatrixXd::Identity(200, 200);
  const Vector b = random_vector(rng, 200);
  const SparseMatrix S = from_dense(A);
  const LUFactorization lu(S);
  const Vector x = lu.solve(b);
  CHECK((A * x - b).lpNorm<Eigen::Infinity>() < 1e-10 * (A.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>()));
  // repeated solves are deterministic
  CHECK(lu.solve(b) == x);
}

TEST_CASE("singular matrix raises SolverError") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D(0, 0) = 1.0;
  CHECK_THROWS_AS(lu_solve(from_dense(D), Vector::Ones(3)), SolverError);
}

TEST_CASE("Dirichlet elimination keeps symmetry and prescribed values") {
  Eigen::MatrixXd D(3, 3);
  D << 4, 1, 0, 1, 4, 1, 0, 1, 4;
  SparseMatrix A = from_dense(D);
  Vector b = Vector::Ones(3);
  Vector vals(1);
  vals << 0.7;
  apply_dirichlet(A, b, {1}, vals);
  const Eigen::MatrixXd E(A);
  CHECK((E - E.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Vector x = lu_solve(A, b);
  CHECK(x[1] == 0.7);
  // full solve with the constraint substituted
  CHECK(4 * x[0] + 0.7 == doctest::Approx(1.0));
  CHECK(4 * x[2] + 0.7 == doctest::Approx(1.0));
}

TEST_CASE("steady Stokes reproduces a quadratic velocity and linear pressure") {
  // u = (y^2, x^2), p = x + y - 1 is divergence free; -Lap u + grad p = (-1, -1).
  const Mesh m = unit_square(4, 2);
  for (auto cont : {Continuity::Global, Continuity::SubdomainDiscontinuous}) {
    const FESpacePair sp = build_taylor_hood(m, 2, cont);
    const auto ue = [](const Vec2& x) { return Vec2(x.y() * x.y(), x.x() * x.x()); };
    const SaddleSystem sys = stokes(m, sp, ue, [](const Vec2&) { return Vec2(-1.0, -1.0); });
    const SaddleSolution s = solve_saddle(sys);
    CHECK(s.residual < 1e-9);
    CHECK(std::abs(sys.mean.dot(s.p)) < 1e-10);
    CHECK((s.u - interpolate_vector(sp.velocity, m, ue)).lpNorm<Eigen::Infinity>() < 1e-10);
    const Vector pe = interpolate(sp.pressure, m, ScalarField([](const Vec2& x) { return x.x() + x.y() - 1.0; }));
    CHECK((s.p - pe).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK((sys.B * s.u).lpNorm<Eigen::Infinity>() < 1e-12);
    // determinism
    const SaddleSolution again = solve_saddle(sys);
    CHECK(again.u == s.u);
    CHECK(again.p == s.p);
  }
}

TEST_CASE("zero data gives the zero solution on the bubble mesh") {
  const Mesh m = bubble(0.2, 2);
  const FESpacePair sp = build_spaces(m, 2);
  SaddleSystem sys;
  sys.Kuu = assemble(MatrixKind::A_mu, m, sp, bp1());
  sys.B = assemble(MatrixKind::C, m, sp, bp1());
  sys.rhs_u = Vector::Zero(sp.num_velocity());
  sys.rhs_p = Vector::Zero(sp.num_pressure());
  sys.mean = mean_vector(m, sp.pressure);
  for (int d : sp.boundary_dofs)
    for (int c = 0; c < 2; ++c) sys.dirichlet_dofs.push_back(2 * d + c);
  sys.dirichlet_values = Vector::Zero(static_cast<Eigen::Index>(sys.dirichlet_dofs.size()));
  const SaddleSolution s = solve_saddle(sys);
  CHECK(s.u.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.p.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("discrete inf-sup: only the constant pressure mode is spurious") {
  // A phase-wise constant with a jump is not in the kernel: it pairs with v.n
  // on the interface.
  for (int k = 2; k <= 3; ++k) {
    const Mesh m = bubble(0.2, k);
    const FESpacePair sp = build_spaces(m, k);
    const Eigen::MatrixXd B(assemble(MatrixKind::C, m, sp));
    std::vector<char> fixed(sp.num_velocity(), 0);
    for (int d : sp.boundary_dofs) fixed[2 * d] = fixed[2 * d + 1] = 1;
    std::vector<int> free;
    for (int i = 0; i < sp.num_velocity(); ++i)
      if (!fixed[i]) free.push_back(i);
    Eigen::MatrixXd Bf(B.rows(), static_cast<Eigen::Index>(free.size()));
    for (std::size_t j = 0; j < free.size(); ++j) Bf.col(j) = B.col(free[j]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Bf);
    const Vector sv = svd.singularValues();
    const double tol = 1e-10 * sv[0];
    int null = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) null += sv[i] < tol;
    CAPTURE(k);
    CHECK(null == 1);
  }
}
