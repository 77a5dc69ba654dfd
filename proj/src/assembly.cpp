#include "alefem/assembly.hpp"

#include "element_data.hpp"

#include <atomic>

namespace alefem {
namespace {

std::atomic<double> g_mass_fault{0.0};

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void check_space(const Mesh& mesh, const ScalarSpace& s) {
  if (s.num_elements() != mesh.num_elements()) throw Error("space does not belong to this mesh");
}

}  // namespace

const char* to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::M: return "M";
    case MatrixKind::M_rho: return "M_rho";
    case MatrixKind::A: return "A";
    case MatrixKind::A_mu: return "A_mu";
    case MatrixKind::C: return "C";
  }
  return "?";
}

void set_mass_fault(double eps) { g_mass_fault = eps; }
double mass_fault() { return g_mass_fault; }

SparseMatrix assemble_scalar(MatrixKind kind, const Mesh& mesh, const ScalarSpace& space) {
  if (kind != MatrixKind::M && kind != MatrixKind::A) throw Error("scalar assembly supports M and A only");
  check_space(mesh, space);
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(space.reference(), rule);
  const int nb = tab.nb;
  const double scale = kind == MatrixKind::M ? 1.0 + mass_fault() : 1.0;
  std::vector<detail::QuadPoint> qp;
  std::vector<Vec2> grad(nb);
  Eigen::MatrixXd local(nb, nb);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * nb * nb);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    detail::element_geometry(mesh, e, rule, geo, qp);
    local.setZero();
    for (int q = 0; q < tab.nq; ++q) {
      if (kind == MatrixKind::M) {
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j) local(i, j) += qp[q].w * tab.value(q, i) * tab.value(q, j);
      } else {
        for (int j = 0; j < nb; ++j) grad[j] = qp[q].Jinv.transpose() * tab.grad(q, j);
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j) local(i, j) += qp[q].w * grad[i].dot(grad[j]);
      }
    }
    auto d = space.dofs(e);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) trip.emplace_back(d[i], d[j], scale * local(i, j));
  }
  return from_triplets(space.num_dofs(), space.num_dofs(), trip);
}

SparseMatrix assemble(MatrixKind kind, const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params) {
  const ScalarSpace& vs = spaces.velocity;
  const ScalarSpace& ps = spaces.pressure;
  check_space(mesh, vs);
  check_space(mesh, ps);
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(vs.reference(), rule), ptab(ps.reference(), rule);
  const int nb = tab.nb, np = ptab.nb;
  const int nv = spaces.num_velocity();
  std::vector<detail::QuadPoint> qp;
  std::vector<Vec2> grad(nb);
  Triplets trip;

  const bool is_c = kind == MatrixKind::C;
  Eigen::MatrixXd local(is_c ? np : 2 * nb, 2 * nb);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    detail::element_geometry(mesh, e, rule, geo, qp);
    const Phase ph = mesh.phase(e);
    double coef = 1.0;
    if (kind == MatrixKind::M_rho) coef = params.rho(ph);
    if (kind == MatrixKind::A_mu) coef = params.mu(ph);
    if (kind == MatrixKind::M || kind == MatrixKind::M_rho) coef *= 1.0 + mass_fault();
    local.setZero();
    for (int q = 0; q < tab.nq; ++q) {
      const double w = coef * qp[q].w;
      switch (kind) {
        case MatrixKind::M:
        case MatrixKind::M_rho:
          for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
              const double v = w * tab.value(q, i) * tab.value(q, j);
              local(2 * i, 2 * j) += v;
              local(2 * i + 1, 2 * j + 1) += v;
            }
          break;
        case MatrixKind::A:
          for (int j = 0; j < nb; ++j) grad[j] = qp[q].Jinv.transpose() * tab.grad(q, j);
          for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
              const double v = w * grad[i].dot(grad[j]);
              local(2 * i, 2 * j) += v;
              local(2 * i + 1, 2 * j + 1) += v;
            }
          break;
        case MatrixKind::A_mu:
          // 2 mu D(phi_j e_d) : D(phi_i e_c) = mu (delta_cd grad_i . grad_j + d_d phi_i d_c phi_j)
          for (int j = 0; j < nb; ++j) grad[j] = qp[q].Jinv.transpose() * tab.grad(q, j);
          for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
              const double dot = grad[i].dot(grad[j]);
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                  local(2 * i + c, 2 * j + d) += w * ((c == d ? dot : 0.0) + grad[i][d] * grad[j][c]);
            }
          break;
        case MatrixKind::C:
          for (int j = 0; j < nb; ++j) grad[j] = qp[q].Jinv.transpose() * tab.grad(q, j);
          for (int i = 0; i < np; ++i)
            for (int j = 0; j < nb; ++j)
              for (int d = 0; d < 2; ++d) local(i, 2 * j + d) += w * ptab.value(q, i) * grad[j][d];
          break;
      }
    }
    auto dv = vs.dofs(e);
    if (is_c) {
      auto dp = ps.dofs(e);
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < nb; ++j)
          for (int d = 0; d < 2; ++d) trip.emplace_back(dp[i], 2 * dv[j] + d, local(i, 2 * j + d));
    } else {
      for (int i = 0; i < nb; ++i)
        for (int c = 0; c < 2; ++c)
          for (int j = 0; j < nb; ++j)
            for (int d = 0; d < 2; ++d) {
              const double v = local(2 * i + c, 2 * j + d);
              if (v != 0.0 || c == d) trip.emplace_back(2 * dv[i] + c, 2 * dv[j] + d, v);
            }
    }
  }
  return from_triplets(is_c ? spaces.num_pressure() : nv, nv, trip);
}

SparseMatrix assemble_convection(const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params,
                                 const Vector& a) {
  const ScalarSpace& vs = spaces.velocity;
  check_space(mesh, vs);
  if (static_cast<int>(a.size()) != spaces.num_velocity())
    throw Error("transport field has " + std::to_string(a.size()) + " entries, expected " +
                std::to_string(spaces.num_velocity()));
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(vs.reference(), rule);
  const int nb = tab.nb;
  std::vector<detail::QuadPoint> qp;
  std::vector<Vec2> grad(nb);
  Eigen::MatrixXd local(nb, nb);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * nb * nb * 2);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    detail::element_geometry(mesh, e, rule, geo, qp);
    const double rho = params.rho(mesh.phase(e));
    auto dv = vs.dofs(e);
    local.setZero();
    for (int q = 0; q < tab.nq; ++q) {
      Vec2 aq = Vec2::Zero();
      for (int j = 0; j < nb; ++j) aq += tab.value(q, j) * Vec2(a[2 * dv[j]], a[2 * dv[j] + 1]);
      for (int j = 0; j < nb; ++j) grad[j] = qp[q].Jinv.transpose() * tab.grad(q, j);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) local(i, j) += rho * qp[q].w * tab.value(q, i) * aq.dot(grad[j]);
    }
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j)
        for (int c = 0; c < 2; ++c) trip.emplace_back(2 * dv[i] + c, 2 * dv[j] + c, local(i, j));
  }
  return from_triplets(spaces.num_velocity(), spaces.num_velocity(), trip);
}

Vector assemble_load(const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params, bool weighted_by_rho,
                     const std::function<Vec2(const Vec2&)>& f) {
  const ScalarSpace& vs = spaces.velocity;
  check_space(mesh, vs);
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(vs.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  Vector F = Vector::Zero(spaces.num_velocity());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    detail::element_geometry(mesh, e, rule, geo, qp);
    const double wt = weighted_by_rho ? params.rho(mesh.phase(e)) : 1.0;
    auto dv = vs.dofs(e);
    for (int q = 0; q < tab.nq; ++q) {
      const Vec2 fq = wt * qp[q].w * f(qp[q].x);
      for (int i = 0; i < tab.nb; ++i) {
        F[2 * dv[i]] += fq.x() * tab.value(q, i);
        F[2 * dv[i] + 1] += fq.y() * tab.value(q, i);
      }
    }
  }
  return F;
}

Vector assemble_load(const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params, bool weighted_by_rho) {
  const Vec2 f(0.0, -params.g);
  return assemble_load(mesh, spaces, params, weighted_by_rho, [f](const Vec2&) { return f; });
}

Vector mean_vector(const Mesh& mesh, const ScalarSpace& space) {
  check_space(mesh, space);
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(space.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  Vector m = Vector::Zero(space.num_dofs());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    detail::element_geometry(mesh, e, rule, geo, qp);
    auto d = space.dofs(e);
    for (int q = 0; q < tab.nq; ++q)
      for (int i = 0; i < tab.nb; ++i) m[d[i]] += qp[q].w * tab.value(q, i);
  }
  return m;
}

double quadratic_norm(std::span<const double> v, NormKind kind, const Mesh& mesh, const ScalarSpace& space) {
  const int n = space.num_dofs();
  const int comps = static_cast<int>(v.size()) == n ? 1 : (static_cast<int>(v.size()) == 2 * n ? 2 : 0);
  if (comps == 0)
    throw Error("vector of size " + std::to_string(v.size()) + " does not match a space with " +
                std::to_string(n) + " DOFs");
  SparseMatrix K;
  if (kind == NormKind::M) K = assemble_scalar(MatrixKind::M, mesh, space);
  else if (kind == NormKind::A) K = assemble_scalar(MatrixKind::A, mesh, space);
  else K = assemble_scalar(MatrixKind::M, mesh, space) + assemble_scalar(MatrixKind::A, mesh, space);
  double total = 0.0;
  for (int c = 0; c < comps; ++c) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = v[comps * i + c];
    total += x.dot(K * x);
  }
  return total;
}

}  // namespace alefem
