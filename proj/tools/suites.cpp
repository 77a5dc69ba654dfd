#include "suites.hpp"

#include "alefem/quadrature.hpp"
#include "alefem/verify.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace alefem::cli {
namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = scale * dist(rng);
  return v;
}

std::vector<Check> homotopy() {
  const PhaseParams bp1{1000.0, 100.0, 10.0, 1.0, 0.98};
  const Mesh mesh = generate_bubble_mesh(Rect{}, {0.5, 0.5}, 0.25, 0.2, 2);
  const FESpacePair spaces = build_spaces(mesh, 2);
  std::mt19937_64 rng(20240611);
  std::vector<Check> out;
  for (MatrixKind kind : {MatrixKind::M, MatrixKind::M_rho, MatrixKind::A, MatrixKind::A_mu, MatrixKind::C}) {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const Vector e = random_vector(rng, 2 * mesh.num_nodes(), 1e-2);
      const Vector u = random_vector(rng, spaces.num_velocity(), 1.0);
      const Vector v =
          random_vector(rng, kind == MatrixKind::C ? spaces.num_pressure() : spaces.num_velocity(), 1.0);
      worst = std::max(worst, homotopy_identity_residual(mesh, spaces, bp1, e, kind, u, v));
    }
    out.push_back({std::string("homotopy ") + to_string(kind), worst < 1e-9,
                   fmt("max residual %.3e (limit 1e-9)", worst)});
  }
  return out;
}

std::vector<Check> transport() {
  const Mesh mesh = generate_bubble_mesh(Rect{}, {0.5, 0.5}, 0.25, 0.2, 2);
  const ScalarSpace space = ScalarSpace::lagrange(mesh, 2);
  const Vector f = interpolate(space, mesh, ScalarField([](const Vec2& x) {
                                 return 1.0 + std::sin(3.0 * x.x()) * std::cos(2.0 * x.y());
                               }));
  Vector w(2 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 x = mesh.node(i);
    w[2 * i] = std::sin(2.0 * x.x() + x.y());
    w[2 * i + 1] = std::cos(x.x() - 3.0 * x.y());
  }
  std::vector<Check> out;
  double r_prev = 0.0, order = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double r = std::abs(transport_formula_residual(mesh, space, f, w, 1e-2 / std::pow(2.0, i)));
    if (i > 0) order = std::log2(r_prev / r);
    r_prev = r;
  }
  out.push_back({"transport first-order decay", order >= 0.9 && order <= 1.1,
                 fmt("order %.4f (expected [0.9, 1.1])", order)});
  Vector shift(2 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    shift[2 * i] = 0.3;
    shift[2 * i + 1] = -0.2;
  }
  const double r = std::abs(transport_formula_residual(mesh, space, f, shift, 0.05));
  out.push_back({"transport rigid translation", r < 1e-12, fmt("residual %.3e (limit 1e-12)", r)});
  return out;
}

std::vector<Check> manufactured() {
  std::vector<Check> out;
  const auto exact = decaying_vortex_solution();
  std::vector<double> h, eu, ep;
  for (int n : {5, 10, 20}) {
    const auto e = manufactured_flow_errors(exact, 2, n, 1e-4, 0.01);
    h.push_back(e.h);
    eu.push_back(e.velocity_h1);
    ep.push_back(e.pressure_l2);
  }
  const auto ru = make_rate_report("u H1", h, eu);
  const auto rp = make_rate_report("p L2", h, ep);
  out.push_back({"manufactured velocity H1 rate", ru.rates.back() >= 1.8,
                 fmt("rates %.3f, %.3f (limit 1.8)", ru.rates[0], ru.rates[1])});
  out.push_back({"manufactured pressure L2 rate", rp.rates.back() >= 1.6,
                 fmt("rates %.3f, %.3f (limit 1.6)", rp.rates[0], rp.rates[1])});
  for (int k : {2, 3}) {
    const auto e = manufactured_flow_errors(steady_polynomial_solution(), k, 4, 0.1, 0.3);
    const double worst = std::max(e.velocity_h1, e.pressure_l2);
    out.push_back({"polynomial reproduction k=" + std::to_string(k), worst < 1e-9,
                   fmt("max error %.3e (limit 1e-9)", worst)});
  }
  return out;
}

std::vector<Check> reference() {
  std::vector<Check> out;
  const Mesh tri(1, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0}, {0, 1, 2}, {Phase::Plus});
  const ScalarSpace p1 = ScalarSpace::lagrange(tri, 1);
  const Eigen::MatrixXd M(assemble_scalar(MatrixKind::M, tri, p1));
  const Eigen::MatrixXd A(assemble_scalar(MatrixKind::A, tri, p1));
  Eigen::Matrix3d Mx, Ax;
  Mx << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  Mx /= 24.0;
  Ax << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  Ax /= 2.0;
  const double em = (M - Mx).cwiseAbs().maxCoeff(), ea = (A - Ax).cwiseAbs().maxCoeff();
  out.push_back({"reference P1 mass", em < 1e-14, fmt("max deviation %.3e (limit 1e-14)", em)});
  out.push_back({"reference P1 stiffness", ea < 1e-14, fmt("max deviation %.3e (limit 1e-14)", ea)});

  double worst = 0.0;
  for (int d = 0; d <= kMaxTriangleDegree; ++d) {
    const QuadRule& rule = triangle_rule(d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double q = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i)
          q += rule.weights[i] * std::pow(rule.points[i].x(), a) * std::pow(rule.points[i].y(), b);
        const double exact = std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
        worst = std::max(worst, std::abs(q - exact) / exact);
      }
  }
  out.push_back({"quadrature exactness", worst < 1e-14, fmt("max relative error %.3e (limit 1e-14)", worst)});
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"homotopy", "transport", "manufactured", "reference", "all"};
  return names;
}

std::vector<Check> run_suite(const std::string& suite, const std::function<void(const Check&)>& report) {
  std::vector<Check> all;
  auto add = [&](std::vector<Check> checks) {
    for (auto& c : checks) {
      if (report) report(c);
      all.push_back(std::move(c));
    }
  };
  const bool every = suite == "all";
  if (every || suite == "reference") add(reference());
  if (every || suite == "homotopy") add(homotopy());
  if (every || suite == "transport") add(transport());
  if (every || suite == "manufactured") add(manufactured());
  if (all.empty()) throw Error("unknown verify suite '" + suite + "'");
  return all;
}

}  // namespace alefem::cli
