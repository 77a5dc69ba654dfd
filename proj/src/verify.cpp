#include "alefem/verify.hpp"

#include "element_data.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace alefem {
namespace {

Mat2 sym(const Mat2& a) { return 0.5 * (a + a.transpose()); }

double ddot(const Mat2& a, const Mat2& b) { return (a.array() * b.array()).sum(); }

// d/dtheta of the quadrature form v^T K u on the mesh x* + theta e, summed
// over the same reference rule used by the assembly.
double shape_derivative(const Mesh& mesh, const FESpacePair& spaces, const PhaseParams& params, const Vector& e,
                        MatrixKind kind, const Vector& u, const Vector& v) {
  const ScalarSpace& vs = spaces.velocity;
  const ScalarSpace& ps = spaces.pressure;
  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(vs.reference(), rule), ptab(ps.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  double total = 0.0;
  for (int el = 0; el < mesh.num_elements(); ++el) {
    detail::element_geometry(mesh, el, rule, geo, qp);
    const Phase ph = mesh.phase(el);
    auto nodes = mesh.element_nodes(el);
    auto dv = vs.dofs(el);
    for (int q = 0; q < tab.nq; ++q) {
      const Mat2 Jit = qp[q].Jinv.transpose();
      Mat2 Ge = Mat2::Zero();
      for (int j = 0; j < geo.nb; ++j)
        Ge += Vec2(e[2 * nodes[j]], e[2 * nodes[j] + 1]) * (Jit * geo.grad(q, j)).transpose();
      const double dive = Ge.trace();

      Vec2 uq = Vec2::Zero();
      Mat2 Gu = Mat2::Zero();
      for (int j = 0; j < tab.nb; ++j) {
        const Vec2 c(u[2 * dv[j]], u[2 * dv[j] + 1]);
        uq += tab.value(q, j) * c;
        Gu += c * (Jit * tab.grad(q, j)).transpose();
      }
      double val = 0.0;
      if (kind == MatrixKind::C) {
        double pq = 0.0;
        auto dp = ps.dofs(el);
        for (int j = 0; j < ptab.nb; ++j) pq += ptab.value(q, j) * v[dp[j]];
        val = pq * (Gu.trace() * dive - (Gu * Ge).trace());
      } else {
        Vec2 vq = Vec2::Zero();
        Mat2 Gv = Mat2::Zero();
        for (int j = 0; j < tab.nb; ++j) {
          const Vec2 c(v[2 * dv[j]], v[2 * dv[j] + 1]);
          vq += tab.value(q, j) * c;
          Gv += c * (Jit * tab.grad(q, j)).transpose();
        }
        switch (kind) {
          case MatrixKind::M: val = uq.dot(vq) * dive; break;
          case MatrixKind::M_rho: val = params.rho(ph) * uq.dot(vq) * dive; break;
          case MatrixKind::A: {
            const Mat2 D = dive * Mat2::Identity() - 2.0 * sym(Ge);
            val = (Gu * D * Gv.transpose()).trace();
            break;
          }
          case MatrixKind::A_mu: {
            const Mat2 Du = sym(Gu), Dv = sym(Gv);
            val = 2.0 * params.mu(ph) * (ddot(Du, Dv) * dive - ddot(sym(Gu * Ge), Dv) - ddot(Du, sym(Gv * Ge)));
            break;
          }
          case MatrixKind::C: break;
        }
      }
      total += qp[q].w * val;
    }
  }
  return total;
}

void check_nodal(const Mesh& mesh, const Vector& v, const char* what) {
  if (v.size() != 2 * mesh.num_nodes())
    throw Error(std::string(what) + " must be a nodal vector of size " + std::to_string(2 * mesh.num_nodes()));
}

}  // namespace

double homotopy_identity_residual(const Mesh& mesh_star, const FESpacePair& spaces, const PhaseParams& params,
                                  const Vector& e, MatrixKind kind, const Vector& u, const Vector& v,
                                  int n_theta) {
  check_nodal(mesh_star, e, "displacement");
  if (u.size() != spaces.num_velocity()) throw Error("u must be a velocity vector");
  const int nv = kind == MatrixKind::C ? spaces.num_pressure() : spaces.num_velocity();
  if (v.size() != nv) throw Error(std::string("v has the wrong size for kind ") + to_string(kind));
  if (n_theta < 1) throw Error("n_theta must be positive");

  const Mesh end = mesh_star.displaced(as_span(e));
  const double lhs = v.dot(assemble(kind, end, spaces, params) * u) -
                     v.dot(assemble(kind, mesh_star, spaces, params) * u);

  std::vector<double> theta, weight;
  gauss_legendre01(n_theta, theta, weight);
  double rhs = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const Vector d = theta[i] * e;
    const Mesh mid = mesh_star.displaced(as_span(d));
    rhs += weight[i] * shape_derivative(mid, spaces, params, e, kind, u, v);
  }
  return std::abs(lhs - rhs);
}

double transport_formula_residual(const Mesh& mesh, const ScalarSpace& space, const Vector& f, const Vector& w,
                                  double tau) {
  check_nodal(mesh, w, "mesh velocity");
  if (f.size() != space.num_dofs()) throw Error("f does not match the space");
  if (!(tau > 0.0)) throw Error("tau must be positive");
  const Mesh moved = mesh.with_coordinates(advance_mesh(mesh.coordinates(), as_span(w), tau));
  check_valid(moved);

  const auto& rule = detail::volume_rule(mesh);
  const detail::Tabulation geo(mesh.reference(), rule), tab(space.reference(), rule);
  std::vector<detail::QuadPoint> qp, qm;
  double before = 0.0, after = 0.0, flux = 0.0;
  for (int el = 0; el < mesh.num_elements(); ++el) {
    detail::element_geometry(mesh, el, rule, geo, qp);
    detail::element_geometry(moved, el, rule, geo, qm);
    auto nodes = mesh.element_nodes(el);
    auto d = space.dofs(el);
    for (int q = 0; q < tab.nq; ++q) {
      double fq = 0.0;
      for (int j = 0; j < tab.nb; ++j) fq += tab.value(q, j) * f[d[j]];
      double divw = 0.0;
      const Mat2 Jit = qp[q].Jinv.transpose();
      for (int j = 0; j < geo.nb; ++j) {
        const Vec2 g = Jit * geo.grad(q, j);
        divw += w[2 * nodes[j]] * g.x() + w[2 * nodes[j] + 1] * g.y();
      }
      before += qp[q].w * fq;
      after += qm[q].w * fq;
      flux += qp[q].w * fq * divw;
    }
  }
  return (after - before) / tau - flux;
}

double convergence_rate(double d_coarse, double d_fine, double m) {
  if (!(d_coarse > 0.0) || !(d_fine > 0.0))
    throw Error("convergence rate needs positive differences, got " + std::to_string(d_coarse) + " and " +
                std::to_string(d_fine));
  if (!(m > 1.0)) throw Error("refinement factor must exceed 1");
  return std::log(d_coarse / d_fine) / std::log(m);
}

RateReport make_rate_report(std::string norm, std::vector<double> h, std::vector<double> errors) {
  if (h.size() != errors.size()) throw Error("h and error lists differ in length");
  RateReport r{std::move(norm), std::move(h), std::move(errors), {}};
  for (std::size_t i = 0; i + 1 < r.error_values.size(); ++i) {
    const double a = r.error_values[i], b = r.error_values[i + 1];
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      r.rates.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    r.rates.push_back(convergence_rate(a, b, r.h_values[i] / r.h_values[i + 1]));
  }
  return r;
}

ManufacturedSolution decaying_vortex_solution() {
  using std::numbers::pi;
  ManufacturedSolution s;
  s.velocity = [](const Vec2& x, double t) {
    const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
    const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
    const double a = 2.0 * pi * std::exp(-t);
    return Vec2(a * sx * sx * sy * cy, -a * sx * cx * sy * sy);
  };
  s.velocity_gradient = [](const Vec2& x, double t) {
    const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
    const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
    const double b = pi * pi * std::exp(-t);
    Mat2 g;
    g << 4.0 * b * sx * sy * cx * cy, 2.0 * b * sx * sx * (cy * cy - sy * sy),
        2.0 * b * sy * sy * (sx * sx - cx * cx), -4.0 * b * sx * sy * cx * cy;
    return g;
  };
  s.pressure = [](const Vec2& x, double t) {
    return std::exp(-t) * std::cos(pi * x.x()) * std::cos(pi * x.y());
  };
  s.force = [](const Vec2& x, double t) {
    const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
    const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
    const double et = std::exp(t), pre = pi * std::exp(-2.0 * t), p2 = pi * pi;
    const double f1 =
        pre * ((-2.0 * sx * sx * sy + 16.0 * p2 * sx * sx * sy - sx - 4.0 * p2 * sy) * et * cy +
               4.0 * p2 * sx * sx * sx * sy * sy * cx);
    const double f2 =
        pre * ((-16.0 * p2 * sx * sy * sy + 2.0 * sx * sy * sy + 4.0 * p2 * sx - sy) * et * cx +
               4.0 * p2 * sx * sx * sy * sy * sy * cy);
    return Vec2(f1, f2);
  };
  return s;
}

ManufacturedSolution steady_polynomial_solution() {
  ManufacturedSolution s;
  s.velocity = [](const Vec2& x, double) { return Vec2(x.x() * x.x(), -2.0 * x.x() * x.y()); };
  s.velocity_gradient = [](const Vec2& x, double) {
    Mat2 g;
    g << 2.0 * x.x(), 0.0, -2.0 * x.y(), -2.0 * x.x();
    return g;
  };
  s.pressure = [](const Vec2& x, double) { return x.x() - 0.5; };
  s.force = [](const Vec2& x, double) {
    return Vec2(2.0 * x.x() * x.x() * x.x() - 1.0, 2.0 * x.x() * x.x() * x.y());
  };
  return s;
}

ManufacturedErrors manufactured_flow_errors(const ManufacturedSolution& exact, int k, int n, double tau, double T) {
  if (n < 1) throw Error("mesh resolution must be positive");
  SimConfig c;
  c.params = PhaseParams{1.0, 1.0, 1.0, 1.0, 0.0};
  c.k = k;
  c.h = 1.0 / n;
  c.tau = tau;
  c.T = T;
  c.rect = Rect{0.0, 0.0, 1.0, 1.0};
  c.force = exact.force;
  c.boundary_velocity = exact.velocity;
  c.initial_velocity = [&](const Vec2& x) { return exact.velocity(x, 0.0); };
  c.initial_mesh = generate_rectangle_mesh(c.rect, n, n, k);
  State s = initialize(c);
  for (int i = 0, steps = num_steps(c); i < steps; ++i) s = step(std::move(s), c);

  const Mesh& mesh = s.mesh;
  const auto& rule = triangle_rule(std::min(2 * k + 4, kMaxTriangleDegree));
  const detail::Tabulation geo(mesh.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  ManufacturedErrors err;
  err.h = 1.0 / n;
  for (int el = 0; el < mesh.num_elements(); ++el) {
    detail::element_geometry(mesh, el, rule, geo, qp);
    for (std::size_t q = 0; q < qp.size(); ++q) {
      const Location loc{el, rule.points[q], 0.0};
      const Vec2 du = evaluate_vector_at(s.spaces.velocity, s.u, loc) - exact.velocity(qp[q].x, s.t);
      const Mat2 dg = vector_gradient_at(s.spaces.velocity, mesh, s.u, loc) -
                      exact.velocity_gradient(qp[q].x, s.t);
      const double dp = evaluate_at(s.spaces.pressure, s.p, loc) - exact.pressure(qp[q].x, s.t);
      err.velocity_l2 += qp[q].w * du.squaredNorm();
      err.velocity_h1 += qp[q].w * (du.squaredNorm() + dg.squaredNorm());
      err.pressure_l2 += qp[q].w * dp * dp;
    }
  }
  err.velocity_l2 = std::sqrt(err.velocity_l2);
  err.velocity_h1 = std::sqrt(err.velocity_h1);
  err.pressure_l2 = std::sqrt(err.pressure_l2);
  return err;
}

LevelDifference level_difference(const State& coarse, const State& fine) {
  const Mesh& cm = coarse.mesh;
  const Mesh& fm = fine.mesh;
  const PointLocator locator(fm);
  const auto& rule = detail::volume_rule(cm);
  const detail::Tabulation geo(cm.reference(), rule);
  std::vector<detail::QuadPoint> qp;
  LevelDifference d;
  for (int el = 0; el < cm.num_elements(); ++el) {
    detail::element_geometry(cm, el, rule, geo, qp);
    const Phase ph = cm.phase(el);
    for (std::size_t q = 0; q < qp.size(); ++q) {
      const Location lc{el, rule.points[q], 0.0};
      const Location lf = locator.find(qp[q].x, ph, true);
      const Vec2 du = evaluate_vector_at(coarse.spaces.velocity, coarse.u, lc) -
                      evaluate_vector_at(fine.spaces.velocity, fine.u, lf);
      const Mat2 gu = vector_gradient_at(coarse.spaces.velocity, cm, coarse.u, lc) -
                      vector_gradient_at(fine.spaces.velocity, fm, fine.u, lf);
      const Vec2 dw = evaluate_vector_at(coarse.spaces.velocity, coarse.w, lc) -
                      evaluate_vector_at(fine.spaces.velocity, fine.w, lf);
      const Mat2 gw = vector_gradient_at(coarse.spaces.velocity, cm, coarse.w, lc) -
                      vector_gradient_at(fine.spaces.velocity, fm, fine.w, lf);
      const double dp = evaluate_at(coarse.spaces.pressure, coarse.p, lc) -
                        evaluate_at(fine.spaces.pressure, fine.p, lf);
      d.u_h1 += qp[q].w * (du.squaredNorm() + gu.squaredNorm());
      d.w_h1 += qp[q].w * (dw.squaredNorm() + gw.squaredNorm());
      d.p_l2 += qp[q].w * dp * dp;
    }
  }
  d.u_h1 = std::sqrt(d.u_h1);
  d.w_h1 = std::sqrt(d.w_h1);
  d.p_l2 = std::sqrt(d.p_l2);

  // Flow map: displacement x(T) - x(0) as a field on the initial meshes.
  if (coarse.motion.remesh_count > 0 || fine.motion.remesh_count > 0) {
    d.phi_h1 = std::numeric_limits<double>::quiet_NaN();
    return d;
  }
  const Mesh c0 = cm.with_coordinates(coarse.x_origin);
  const Mesh f0 = fm.with_coordinates(fine.x_origin);
  const ScalarSpace cg = ScalarSpace::lagrange(c0, c0.degree());
  const ScalarSpace fg = ScalarSpace::lagrange(f0, f0.degree());
  Vector cphi(2 * c0.num_nodes()), fphi(2 * f0.num_nodes());
  for (int i = 0; i < cphi.size(); ++i) cphi[i] = cm.coordinates()[i] - coarse.x_origin[i];
  for (int i = 0; i < fphi.size(); ++i) fphi[i] = fm.coordinates()[i] - fine.x_origin[i];
  const PointLocator loc0(f0);
  for (int el = 0; el < c0.num_elements(); ++el) {
    detail::element_geometry(c0, el, rule, geo, qp);
    const Phase ph = c0.phase(el);
    for (std::size_t q = 0; q < qp.size(); ++q) {
      const Location lc{el, rule.points[q], 0.0};
      const Location lf = loc0.find(qp[q].x, ph, true);
      const Vec2 dv = evaluate_vector_at(cg, cphi, lc) - evaluate_vector_at(fg, fphi, lf);
      const Mat2 dg = vector_gradient_at(cg, c0, cphi, lc) - vector_gradient_at(fg, f0, fphi, lf);
      d.phi_h1 += qp[q].w * (dv.squaredNorm() + dg.squaredNorm());
    }
  }
  d.phi_h1 = std::sqrt(d.phi_h1);
  return d;
}

ConvergenceReport convergence_study(const SimConfig& config, int levels, int m,
                                    const std::function<void(const std::string&)>& log) {
  if (levels < 3) throw Error("a rate estimate needs at least 3 mesh levels");
  if (m < 2) throw Error("refinement factor m must be at least 2");
  validate(config);
  std::vector<Mesh> meshes;
  if (m == 2) {
    meshes = generate_nested_bubble_meshes(config.rect, config.circle_center, config.circle_radius, config.h,
                                           config.k, levels);
  } else {
    for (int l = 0; l < levels; ++l)
      meshes.push_back(generate_bubble_mesh(config.rect, config.circle_center, config.circle_radius,
                                            config.h / std::pow(m, l), config.k));
  }
  ConvergenceReport rep;
  std::vector<State> finals;
  for (int l = 0; l < levels; ++l) {
    SimConfig c = config;
    c.h = config.h / std::pow(m, l);
    c.initial_mesh = meshes[l];
    if (log)
      log("level " + std::to_string(l) + ": h = " + std::to_string(c.h) + ", " +
          std::to_string(meshes[l].num_elements()) + " elements");
    State s = initialize(c);
    for (int i = 0, n = num_steps(c); i < n; ++i) s = step(std::move(s), c);
    rep.h.push_back(c.h);
    rep.remesh_counts.push_back(s.motion.remesh_count);
    finals.push_back(std::move(s));
  }
  std::vector<double> hu, eu, ew, ephi, ep;
  for (int l = 0; l + 1 < levels; ++l) {
    rep.differences.push_back(level_difference(finals[l], finals[l + 1]));
    hu.push_back(rep.h[l]);
    eu.push_back(rep.differences.back().u_h1);
    ew.push_back(rep.differences.back().w_h1);
    ephi.push_back(rep.differences.back().phi_h1);
    ep.push_back(rep.differences.back().p_l2);
  }
  rep.u = make_rate_report("u H1", hu, eu);
  rep.w = make_rate_report("w H1", hu, ew);
  rep.phi = make_rate_report("phi H1", hu, ephi);
  rep.p = make_rate_report("p L2", hu, ep);
  return rep;
}

}  // namespace alefem
