#include "alefem/stepper.hpp"

#include "alefem/linalg.hpp"

#include <cmath>
#include <numbers>

namespace alefem {

void validate(const SimConfig& c) {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string("config key '") + key + "' must be positive");
  };
  positive(c.params.rho_plus, "rho_plus");
  positive(c.params.rho_minus, "rho_minus");
  positive(c.params.mu_plus, "mu_plus");
  positive(c.params.mu_minus, "mu_minus");
  if (!(c.params.g >= 0.0)) throw Error("config key 'g' must be non-negative");
  positive(c.h, "h");
  positive(c.tau, "tau");
  if (!(c.T >= 0.0)) throw Error("config key 'T' must be non-negative");
  if (c.k < 1 || c.k > 3) throw Error("config key 'k' must be 1, 2 or 3");
  positive(c.circle_radius, "circle_radius");
  positive(c.remesh_angle, "remesh_angle");
  if (!(c.rect.x1 > c.rect.x0) || !(c.rect.y1 > c.rect.y0)) throw Error("config key 'rect' is degenerate");
}

int num_steps(const SimConfig& c) { return static_cast<int>(std::ceil(c.T / c.tau - 1e-9)); }

State initialize(const SimConfig& c) {
  validate(c);
  State s;
  s.mesh = c.initial_mesh ? *c.initial_mesh
                          : generate_bubble_mesh(c.rect, c.circle_center, c.circle_radius, c.h, c.k);
  if (s.mesh.degree() != c.k) throw Error("initial mesh degree does not match k");
  s.spaces = build_spaces(s.mesh, c.k, c.pressure);
  s.u = c.initial_velocity ? interpolate_vector(s.spaces.velocity, s.mesh, c.initial_velocity)
                           : Vector::Zero(s.spaces.num_velocity());
  s.p = Vector::Zero(s.spaces.num_pressure());
  s.w = harmonic_extension(s.mesh, s.spaces, s.u);
  s.x_origin = s.mesh.coordinates();
  s.motion.last_min_angle = quality(s.mesh).min_angle;
  return s;
}

State step(State s, const SimConfig& c, std::optional<RemeshEvent>* event) {
  const double tau = c.tau;
  const double t_new = (s.step + 1) * tau;

  Mesh moved = s.mesh.with_coordinates(advance_mesh(s.mesh.coordinates(), as_span(s.w), tau));
  try {
    check_valid(moved);
  } catch (const TangledElementError& err) {
    throw Error("step " + std::to_string(s.step + 1) + " (t = " + std::to_string(t_new) +
                "): mesh motion tangled element " + std::to_string(err.element()) +
                " (detJ = " + std::to_string(err.det()) + ")");
  }

  const PhaseParams& pp = c.params;
  const SparseMatrix Mrho = assemble(MatrixKind::M_rho, moved, s.spaces, pp);
  const SparseMatrix Amu = assemble(MatrixKind::A_mu, moved, s.spaces, pp);
  const Vector a = s.u - s.w;
  const SparseMatrix B = assemble_convection(moved, s.spaces, pp, a);
  const SparseMatrix C = assemble(MatrixKind::C, moved, s.spaces, pp);

  SaddleSystem sys;
  sys.Kuu = Mrho / tau + B + Amu;
  sys.rhs_u = Mrho * s.u / tau;
  if (c.force) {
    sys.rhs_u += assemble_load(moved, s.spaces, pp, c.body_force_weighted_by_rho,
                               [&](const Vec2& x) { return c.force(x, t_new); });
  } else {
    sys.rhs_u += assemble_load(moved, s.spaces, pp, c.body_force_weighted_by_rho);
  }
  sys.B = -C;
  sys.rhs_p = Vector::Zero(s.spaces.num_pressure());
  if (s.spaces.zero_mean_pressure) sys.mean = mean_vector(moved, s.spaces.pressure);
  const auto& bd = s.spaces.boundary_dofs;
  sys.dirichlet_dofs.reserve(2 * bd.size());
  sys.dirichlet_values = Vector::Zero(2 * static_cast<Eigen::Index>(bd.size()));
  for (std::size_t i = 0; i < bd.size(); ++i) {
    sys.dirichlet_dofs.push_back(2 * bd[i]);
    sys.dirichlet_dofs.push_back(2 * bd[i] + 1);
    if (c.boundary_velocity) {
      const Vec2 v = c.boundary_velocity(moved.node(bd[i]), t_new);
      sys.dirichlet_values[2 * i] = v.x();
      sys.dirichlet_values[2 * i + 1] = v.y();
    }
  }
  SaddleSolution sol;
  try {
    sol = solve_saddle(sys);
  } catch (const SolverError& err) {
    throw SolverError("step " + std::to_string(s.step + 1) + ": " + err.what());
  }

  s.mesh = std::move(moved);
  s.u = std::move(sol.u);
  s.p = std::move(sol.p);
  s.multiplier = sol.multiplier;
  s.residual = sol.residual;

  RemeshOptions opt;
  opt.angle_threshold = c.remesh_angle;
  opt.rect = c.rect;
  opt.h = c.h;
  opt.pressure = c.pressure;
  RemeshResult rr = check_and_remesh(s.mesh, s.spaces, s.u, s.p, opt);
  if (rr.did_remesh) {
    if (event)
      *event = RemeshEvent{s.step + 1, t_new, rr.min_angle_before, rr.min_angle, s.mesh.num_nodes(),
                           rr.mesh.num_nodes()};
    s.mesh = std::move(rr.mesh);
    s.spaces = std::move(rr.spaces);
    s.u = std::move(rr.u);
    s.p = std::move(rr.p);
    s.x_origin = s.mesh.coordinates();
    ++s.motion.remesh_count;
  } else if (event) {
    event->reset();
  }
  s.motion.last_min_angle = rr.min_angle;
  s.w = harmonic_extension(s.mesh, s.spaces, s.u);
  s.step += 1;
  s.t = t_new;
  return s;
}

BenchmarkRecord make_record(const State& s, const SimConfig& c) {
  BenchmarkRecord r;
  r.t = s.t;
  r.min_angle = s.motion.last_min_angle;
  r.remesh_count = s.motion.remesh_count;
  const Energy en = energy(s.mesh, s.spaces.velocity, s.u, c.params);
  r.kinetic_energy = en.kinetic;
  r.potential_energy = en.potential;
  r.total_energy = en.total;
  if (!s.mesh.interface_edges().empty()) {
    r.area_minus = phase_area(s.mesh, Phase::Minus);
    r.interface_length = interface_length(s.mesh);
    r.circularity = 2.0 * std::sqrt(std::numbers::pi * r.area_minus) / r.interface_length;
    r.center_of_mass = center_of_mass(s.mesh);
    r.rise_velocity = rise_velocity(s.mesh, s.spaces.velocity, s.u);
  }
  return r;
}

RunResult run(const SimConfig& c, const RunSinks& sinks) {
  RunResult out;
  State s = initialize(c);
  auto emit = [&] {
    out.records.push_back(make_record(s, c));
    if (sinks.on_record) sinks.on_record(s, out.records.back());
  };
  emit();
  const int n = num_steps(c);
  for (int i = 0; i < n; ++i) {
    std::optional<RemeshEvent> ev;
    s = step(std::move(s), c, &ev);
    if (ev) {
      out.remesh_events.push_back(*ev);
      if (sinks.on_remesh) sinks.on_remesh(*ev);
    }
    emit();
  }
  out.final_state = std::move(s);
  return out;
}

}  // namespace alefem
