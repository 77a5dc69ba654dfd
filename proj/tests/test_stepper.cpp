#include "helpers.hpp"

#include "alefem/linalg.hpp"

#include <doctest.h>

#include <numbers>

using namespace testing;

namespace {

SimConfig bp1_config(double h, double tau, double T) {
  SimConfig c;
  c.params = bp1();
  c.k = 2;
  c.h = h;
  c.tau = tau;
  c.T = T;
  return c;
}

// Bubble with a polygonal interface, so every element is affine.
Mesh straight_bubble(double h, int k) {
  const int n = 24;
  InterfaceCurve curve = circle_curve({0.5, 0.5}, 0.25, n);
  const auto v = curve.vertices;
  curve.edge_point = [v](std::size_t i, double s) { return Vec2((1.0 - s) * v[i] + s * v[(i + 1) % v.size()]); };
  return generate_fitted_mesh(Rect{}, curve, h, k);
}

}  // namespace

TEST_CASE("validate names the offending key") {
  SimConfig c = bp1_config(0.1, 0.01, 0.1);
  CHECK_NOTHROW(validate(c));
  c.tau = 0.0;
  CHECK_THROWS_WITH(validate(c), doctest::Contains("tau"));
  c = bp1_config(0.1, 0.01, 0.1);
  c.k = 4;
  CHECK_THROWS_WITH(validate(c), doctest::Contains("'k'"));
  c = bp1_config(0.1, 0.01, 0.1);
  c.params.mu_minus = -1.0;
  CHECK_THROWS_WITH(validate(c), doctest::Contains("mu_minus"));
}

TEST_CASE("number of steps") {
  CHECK(num_steps(bp1_config(0.1, 0.005, 0.05)) == 10);
  CHECK(num_steps(bp1_config(0.1, 0.005, 3.0)) == 600);
  CHECK(num_steps(bp1_config(0.1, 0.005, 0.0)) == 0);
  CHECK(num_steps(bp1_config(0.1, 0.3, 1.0)) == 4);
}

TEST_CASE("zero gravity and zero velocity is a fixed point") {
  SimConfig c = bp1_config(0.15, 0.01, 0.05);
  c.params.g = 0.0;
  State s = initialize(c);
  const auto x0 = s.mesh.coordinates();
  for (int n = 0; n < 5; ++n) s = step(std::move(s), c);
  CHECK(s.u.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.p.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.mesh.coordinates() == x0);
}

TEST_CASE("hydrostatic balance is exact on an affine mesh") {
  for (int k = 2; k <= 3; ++k) {
    CAPTURE(k);
    SimConfig c = bp1_config(0.15, 0.005, 0.025);
    c.k = k;
    c.params.rho_minus = c.params.rho_plus;
    c.initial_mesh = straight_bubble(0.15, k);
    for (int e = 0; e < c.initial_mesh->num_elements(); ++e) REQUIRE_FALSE(c.initial_mesh->is_curved(e));
    State s = initialize(c);
    for (int n = 0; n < 5; ++n) s = step(std::move(s), c);
    CHECK(s.u.lpNorm<Eigen::Infinity>() < 1e-9);
    const double rg = c.params.rho_plus * c.params.g;
    Vector pe = interpolate(s.spaces.pressure, s.mesh, ScalarField([&](const Vec2& x) { return -rg * x.y(); }));
    const Vector m = mean_vector(s.mesh, s.spaces.pressure);
    pe.array() -= m.dot(pe) / m.sum();
    CHECK((s.p - pe).lpNorm<Eigen::Infinity>() < 1e-9 * rg);
  }
}

TEST_CASE("bubble starts to rise") {
  const SimConfig c = bp1_config(0.1, 1.0 / 200.0, 10.0 / 200.0);
  const RunResult r = run(c);
  REQUIRE(r.records.size() == 11);
  CHECK(r.records.front().rise_velocity == 0.0);
  CHECK(r.records.back().rise_velocity > 0.0);
  CHECK(r.records.back().center_of_mass.y() > r.records.front().center_of_mass.y());
}

TEST_CASE("record count and times") {
  SimConfig c = bp1_config(0.2, 0.01, 0.0);
  CHECK(run(c).records.size() == 1);
  c.T = 0.02;
  const RunResult r = run(c);
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].t == 0.0);
  CHECK(r.records[1].t == 0.01);
  CHECK(r.records[2].t == 2 * 0.01);
  CHECK(r.final_state.step == 2);
}

TEST_CASE("step invariants") {
  const SimConfig c = bp1_config(0.12, 0.005, 0.05);
  State s = initialize(c);
  for (int n = 1; n <= 4; ++n) {
    const State prev = s;
    s = step(std::move(s), c);
    CAPTURE(n);
    CHECK(s.t == n * c.tau);
    CHECK(s.residual < 1e-9);

    // discrete incompressibility and zero mean pressure on the new mesh
    const SparseMatrix C = assemble(MatrixKind::C, s.mesh, s.spaces, c.params);
    CHECK((C * s.u).lpNorm<Eigen::Infinity>() < 1e-10 * std::max(1e-3, s.u.lpNorm<Eigen::Infinity>()));
    CHECK(std::abs(mean_vector(s.mesh, s.spaces.pressure).dot(s.p)) < 1e-10 * s.p.lpNorm<Eigen::Infinity>());

    // w is the extension of the current u on the current mesh
    CHECK(s.w == harmonic_extension(s.mesh, s.spaces, s.u));

    // interface nodes move with the fluid velocity of the previous step
    for (int d : prev.spaces.interface_dofs)
      if (d < s.mesh.num_nodes())
        for (int comp = 0; comp < 2; ++comp)
          CHECK(s.mesh.coordinates()[2 * d + comp] ==
                prev.mesh.coordinates()[2 * d + comp] + c.tau * prev.u[2 * d + comp]);

    // outer boundary nodes stay put
    for (int d : prev.spaces.boundary_dofs)
      if (d < s.mesh.num_nodes()) CHECK(s.mesh.node(d) == prev.mesh.node(d));
  }
}

TEST_CASE("run reports records and remesh events through sinks") {
  const SimConfig c = bp1_config(0.2, 0.01, 0.03);
  int records = 0;
  RunSinks sinks;
  sinks.on_record = [&](const State& s, const BenchmarkRecord& r) {
    CHECK(r.t == s.t);
    ++records;
  };
  const RunResult r = run(c, sinks);
  CHECK(records == 4);
  CHECK(static_cast<int>(r.records.size()) == records);
  CHECK(r.remesh_events.empty());
  CHECK(r.records.back().remesh_count == 0);
}
