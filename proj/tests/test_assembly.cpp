#include "helpers.hpp"

#include <doctest.h>

using namespace testing;

namespace {

// Two quadratic elements sharing a curved diagonal; one per phase.
Mesh two_element_mesh() {
  return Mesh(2, {0, 0, 1, 0, 1, 1, 0, 1, 0.5, 0, 1, 0.5, 0.56, 0.44, 0.5, 1, 0, 0.5},
              {0, 1, 2, 4, 5, 6, 0, 2, 3, 6, 7, 8}, {Phase::Plus, Phase::Minus});
}

Mat2 sym(const Mat2& a) { return 0.5 * (a + a.transpose()); }

// Gradient forms on curved elements have rational integrands, so they are
// compared under the library's own rule degree; polynomial forms use a finer one.
int oracle_degree(MatrixKind kind, const Mesh& mesh) {
  const bool rational = kind == MatrixKind::A || kind == MatrixKind::A_mu;
  return rational ? std::min(2 * mesh.degree() + 2, kMaxTriangleDegree) : 12;
}

// Straightforward dense reference assembly: one basis pair at a time with
// geometry from element_map.
Eigen::MatrixXd dense_oracle(MatrixKind kind, const Mesh& mesh, const FESpacePair& sp, const PhaseParams& pp,
                             const Vector* a = nullptr) {
  const ReferenceElement& vr = sp.velocity.reference();
  const ReferenceElement& pr = sp.pressure.reference();
  const QuadRule& rule = triangle_rule(oracle_degree(kind, mesh));
  const int nv = sp.num_velocity();
  const bool is_c = kind == MatrixKind::C;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(is_c ? sp.num_pressure() : nv, nv);
  std::vector<double> phi(vr.num_nodes()), psi(pr.num_nodes());
  std::vector<Vec2> dphi(vr.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto dv = sp.velocity.dofs(e);
    const auto dp = sp.pressure.dofs(e);
    const double rho = pp.rho(mesh.phase(e)), mu = pp.mu(mesh.phase(e));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const ElementMap em = element_map(mesh, e, rule.points[q]);
      const double w = rule.weights[q] * em.detJ;
      vr.values(rule.points[q], phi);
      vr.gradients(rule.points[q], dphi);
      pr.values(rule.points[q], psi);
      const Mat2 Jinv = em.J.inverse();
      Vec2 aq = Vec2::Zero();
      if (a)
        for (int j = 0; j < vr.num_nodes(); ++j) aq += phi[j] * Vec2((*a)[2 * dv[j]], (*a)[2 * dv[j] + 1]);
      for (int j = 0; j < vr.num_nodes(); ++j)
        for (int dj = 0; dj < 2; ++dj) {
          // trial function phi_j e_dj
          Mat2 Gu = Mat2::Zero();
          Gu.row(dj) = (Jinv.transpose() * dphi[j]).transpose();
          Vec2 uq = Vec2::Zero();
          uq[dj] = phi[j];
          if (is_c) {
            for (int i = 0; i < pr.num_nodes(); ++i) K(dp[i], 2 * dv[j] + dj) += w * psi[i] * Gu.trace();
            continue;
          }
          for (int i = 0; i < vr.num_nodes(); ++i)
            for (int di = 0; di < 2; ++di) {
              Mat2 Gv = Mat2::Zero();
              Gv.row(di) = (Jinv.transpose() * dphi[i]).transpose();
              Vec2 vq = Vec2::Zero();
              vq[di] = phi[i];
              double val = 0.0;
              switch (kind) {
                case MatrixKind::M: val = uq.dot(vq); break;
                case MatrixKind::M_rho: val = rho * uq.dot(vq); break;
                case MatrixKind::A: val = (Gu.array() * Gv.array()).sum(); break;
                case MatrixKind::A_mu: val = 2.0 * mu * (sym(Gu).array() * sym(Gv).array()).sum(); break;
                case MatrixKind::C: break;
              }
              if (a && kind == MatrixKind::M) val = rho * (Gu * aq).dot(vq);
              K(2 * dv[i] + di, 2 * dv[j] + dj) += w * val;
            }
        }
    }
  }
  return K;
}

double asym(const SparseMatrix& A) {
  const Eigen::MatrixXd D(A);
  return (D - D.transpose()).cwiseAbs().maxCoeff() / D.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("P1 reference matrices on the unit right triangle") {
  const Mesh tri(1, {0, 0, 1, 0, 0, 1}, {0, 1, 2}, {Phase::Plus});
  const ScalarSpace s = ScalarSpace::lagrange(tri, 1);
  const Eigen::MatrixXd M(assemble_scalar(MatrixKind::M, tri, s));
  const Eigen::MatrixXd A(assemble_scalar(MatrixKind::A, tri, s));
  Eigen::Matrix3d Mx, Ax;
  Mx << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  Ax << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  CHECK((M - Mx / 24.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((A - Ax).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("assembled matrices match the dense quadrature oracle") {
  const Mesh m = two_element_mesh();
  REQUIRE(m.interface_edges().size() == 1);
  const PhaseParams pp = bp1();
  for (int k : {2}) {
    const FESpacePair sp = build_spaces(m, k);
    for (MatrixKind kind : {MatrixKind::M, MatrixKind::M_rho, MatrixKind::A, MatrixKind::A_mu, MatrixKind::C}) {
      CAPTURE(to_string(kind));
      const Eigen::MatrixXd K(assemble(kind, m, sp, pp));
      const Eigen::MatrixXd O = dense_oracle(kind, m, sp, pp);
      CHECK((K - O).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, O.cwiseAbs().maxCoeff()));
    }
    std::mt19937_64 rng(8);
    const Vector a = random_vector(rng, sp.num_velocity());
    const Eigen::MatrixXd B(assemble_convection(m, sp, pp, a));
    const Eigen::MatrixXd O = dense_oracle(MatrixKind::M, m, sp, pp, &a);
    CHECK((B - O).cwiseAbs().maxCoeff() < 1e-12 * O.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("convection examples") {
  const Mesh m = bubble(0.2, 2);
  const FESpacePair sp = build_spaces(m, 2);
  const PhaseParams pp = bp1();
  const Vector zero = Vector::Zero(sp.num_velocity());
  CHECK(assemble_convection(m, sp, pp, zero).cwiseAbs().sum() == 0.0);

  std::mt19937_64 rng(3);
  const Vector a = random_vector(rng, sp.num_velocity());
  const SparseMatrix B = assemble_convection(m, sp, pp, a);
  const Vector chi_const = interpolate_vector(sp.velocity, m, [](const Vec2&) { return Vec2(0.3, -1.1); });
  CHECK((B * chi_const).lpNorm<Eigen::Infinity>() < 1e-11);

  // a = (1, 0), chi = (x, 0): (a . grad) chi = (1, 0), so row 2i holds rho_K int phi_i
  const Vector ax = interpolate_vector(sp.velocity, m, [](const Vec2&) { return Vec2(1.0, 0.0); });
  const Vector chi = interpolate_vector(sp.velocity, m, [](const Vec2& x) { return Vec2(x.x(), 0.0); });
  const Vector Bchi = assemble_convection(m, sp, pp, ax) * chi;
  Vector oracle = Vector::Zero(sp.num_velocity());
  const QuadRule& rule = triangle_rule(10);
  std::vector<double> phi(6);
  for (int e = 0; e < m.num_elements(); ++e)
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * element_map(m, e, rule.points[q]).detJ * pp.rho(m.phase(e));
      sp.velocity.reference().values(rule.points[q], phi);
      for (int i = 0; i < 6; ++i) oracle[2 * sp.velocity.dofs(e)[i]] += w * phi[i];
    }
  CHECK((Bchi - oracle).lpNorm<Eigen::Infinity>() < 1e-12 * oracle.lpNorm<Eigen::Infinity>() * 10);
}

TEST_CASE("kernels: divergence of constants, rigid motions") {
  for (int k = 2; k <= 3; ++k) {
    const Mesh m = bubble(0.15, k);
    const FESpacePair sp = build_spaces(m, k);
    const PhaseParams pp = bp1();
    const SparseMatrix C = assemble(MatrixKind::C, m, sp, pp);
    const SparseMatrix A = assemble(MatrixKind::A, m, sp, pp);
    const SparseMatrix Amu = assemble(MatrixKind::A_mu, m, sp, pp);
    const Vector c = interpolate_vector(sp.velocity, m, [](const Vec2&) { return Vec2(2.0, -1.0); });
    CHECK((C * c).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((A * c).lpNorm<Eigen::Infinity>() < 1e-11);
    CHECK((Amu * c).lpNorm<Eigen::Infinity>() < 1e-11);
    const Vector rot = interpolate_vector(sp.velocity, m, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
    CHECK((Amu * rot).lpNorm<Eigen::Infinity>() < 1e-11);
  }
}

TEST_CASE("symmetry and positive semidefiniteness") {
  const Mesh m = bubble(0.15, 2);
  const FESpacePair sp = build_spaces(m, 2);
  std::mt19937_64 rng(12);
  for (MatrixKind kind : {MatrixKind::M, MatrixKind::M_rho, MatrixKind::A, MatrixKind::A_mu}) {
    CAPTURE(to_string(kind));
    const SparseMatrix K = assemble(kind, m, sp, bp1());
    CHECK(asym(K) < 1e-12);
    for (int t = 0; t < 100; ++t) {
      const Vector v = random_vector(rng, sp.num_velocity());
      CHECK(v.dot(K * v) >= 0.0);
    }
  }
}

TEST_CASE("unit coefficients reduce weighted forms to unweighted ones") {
  const Mesh m = bubble(0.15, 2);
  const FESpacePair sp = build_spaces(m, 2);
  const PhaseParams unit{1.0, 1.0, 1.0, 1.0, 0.0};
  const Eigen::MatrixXd M(assemble(MatrixKind::M, m, sp, unit));
  const Eigen::MatrixXd Mr(assemble(MatrixKind::M_rho, m, sp, unit));
  CHECK((M - Mr).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXd Amu(assemble(MatrixKind::A_mu, m, sp, unit));
  const Eigen::MatrixXd O = dense_oracle(MatrixKind::A_mu, m, sp, unit);
  CHECK((Amu - O).cwiseAbs().maxCoeff() < 1e-12 * O.cwiseAbs().maxCoeff());
}

TEST_CASE("load vector") {
  const Mesh m = bubble(0.1, 2);
  const FESpacePair sp = build_spaces(m, 2);
  PhaseParams pp = bp1();
  const Vector ey = interpolate_vector(sp.velocity, m, [](const Vec2&) { return Vec2(0.0, 1.0); });
  const Vector ex = interpolate_vector(sp.velocity, m, [](const Vec2&) { return Vec2(1.0, 0.0); });
  const Vector F = assemble_load(m, sp, pp, false);
  CHECK(F.dot(ey) == doctest::Approx(-1.96).epsilon(1e-12));
  CHECK(std::abs(F.dot(ex)) < 1e-14);
  // weighted: -g (rho+ |Omega+| + rho- |Omega-|)
  const double am = phase_area(m, Phase::Minus);
  const Vector Fw = assemble_load(m, sp, pp, true);
  CHECK(Fw.dot(ey) == doctest::Approx(-0.98 * (1000.0 * (2.0 - am) + 100.0 * am)).epsilon(1e-12));
  pp.g = 0.0;
  CHECK(assemble_load(m, sp, pp, true).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("quadratic-form norms") {
  const Mesh m = bubble(0.1, 2);
  const ScalarSpace s = ScalarSpace::lagrange(m, 2);
  const Vector one = Vector::Ones(s.num_dofs());
  CHECK(quadratic_norm(as_span(one), NormKind::M, m, s) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(quadratic_norm(as_span(one), NormKind::A, m, s)) < 1e-12);
  const Mesh sq = unit_square(4, 2);
  const ScalarSpace ss = ScalarSpace::lagrange(sq, 2);
  const Vector x = interpolate(ss, sq, ScalarField([](const Vec2& p) { return p.x(); }));
  CHECK(quadratic_norm(as_span(x), NormKind::A, sq, ss) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(quadratic_norm(as_span(x), NormKind::K, sq, ss) == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(1e-13));
  const Vector bad = Vector::Ones(3);
  CHECK_THROWS(quadratic_norm(as_span(bad), NormKind::M, sq, ss));
}

TEST_CASE("space from another mesh is rejected") {
  const Mesh a = bubble(0.2, 2), b = bubble(0.15, 2);
  CHECK_THROWS(assemble(MatrixKind::M, a, build_spaces(b, 2), bp1()));
}
