#include "suites.hpp"

#include "alefem/io.hpp"
#include "alefem/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace alefem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

ordered_json config_json(const SimConfig& c) {
  return {{"rho_plus", c.params.rho_plus},
          {"rho_minus", c.params.rho_minus},
          {"mu_plus", c.params.mu_plus},
          {"mu_minus", c.params.mu_minus},
          {"g", c.params.g},
          {"k", c.k},
          {"h", c.h},
          {"tau", c.tau},
          {"T", c.T},
          {"rect", {c.rect.x0, c.rect.y0, c.rect.x1, c.rect.y1}},
          {"circle_center", {c.circle_center.x(), c.circle_center.y()}},
          {"circle_radius", c.circle_radius},
          {"remesh_angle", c.remesh_angle},
          {"body_force_weighted_by_rho", c.body_force_weighted_by_rho},
          {"pressure", c.pressure == Continuity::Global ? "continuous" : "discontinuous"}};
}

int cmd_run(const std::string& config_path, const fs::path& dir, int vtk_every, bool quiet) {
  SimConfig c = load_config(config_path);
  if (vtk_every >= 0) c.vtk_every = vtk_every;
  fs::create_directories(dir);
  std::ofstream csv(dir / "bench.csv");
  if (!csv) throw Error("cannot write " + (dir / "bench.csv").string());
  csv << csv_header() << '\n';

  ordered_json initial;
  ordered_json rows = ordered_json::array();
  ordered_json events = ordered_json::array();
  std::ofstream remesh_log(dir / "remesh.log");
  const int total = num_steps(c);
  RunSinks sinks;
  sinks.on_record = [&](const State& s, const BenchmarkRecord& r) {
    // one CSV row per completed step; the initial state goes to the manifest only
    if (s.step > 0) csv << csv_row(r) << '\n';
    ordered_json row;
    const auto cols = csv_columns();
    const double v[] = {r.t,           r.circularity,     r.center_of_mass.x(), r.center_of_mass.y(),
                        r.rise_velocity, r.kinetic_energy, r.potential_energy,   r.total_energy,
                        r.area_minus,  r.min_angle};
    for (std::size_t i = 0; i < std::size(v); ++i) row[cols[i]] = v[i];
    row["remesh_count"] = r.remesh_count;
    if (s.step > 0) rows.push_back(std::move(row));
    else initial = std::move(row);
    if (c.vtk_every > 0 && s.step % c.vtk_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%06d.vtk", s.step);
      write_vtk(dir / name, s);
    }
    if (!quiet)
      std::fprintf(stderr, "step %d/%d  t = %.4f  circularity = %.6f  rise velocity = %.6f\n", s.step, total, r.t,
                   r.circularity, r.rise_velocity);
  };
  sinks.on_remesh = [&](const RemeshEvent& e) {
    remesh_log << "step " << e.step << " t " << format_number(e.t) << " min_angle " << format_number(e.angle_before)
               << " -> " << format_number(e.angle_after) << " nodes " << e.nodes_before << " -> " << e.nodes_after
               << '\n';
    events.push_back({{"step", e.step},
                      {"t", e.t},
                      {"min_angle_before", e.angle_before},
                      {"min_angle_after", e.angle_after},
                      {"nodes_before", e.nodes_before},
                      {"nodes_after", e.nodes_after}});
  };
  run(c, sinks);

  ordered_json manifest = {{"code_version", kVersion},
                           {"config_file", config_path},
                           {"config", config_json(c)},
                           {"columns", csv_columns()},
                           {"initial_record", initial},
                           {"records", rows},
                           {"remesh_events", events}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  return 0;
}

int cmd_converge(const std::string& config_path, int levels, int m) {
  const SimConfig c = load_config(config_path);
  const auto rep =
      convergence_study(c, levels, m, [](const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); });
  std::printf("%-8s %-12s", "norm", "h");
  std::printf("%-14s %s\n", "difference", "rate");
  for (const RateReport* r : {&rep.u, &rep.w, &rep.phi, &rep.p}) {
    for (std::size_t i = 0; i < r->error_values.size(); ++i) {
      std::printf("%-8s %-12s%-14.6e ", r->norm.c_str(), format_number(r->h_values[i]).c_str(), r->error_values[i]);
      if (i > 0) std::printf("%.4f", r->rates[i - 1]);
      std::printf("\n");
    }
  }
  for (std::size_t l = 0; l < rep.remesh_counts.size(); ++l)
    if (rep.remesh_counts[l] > 0)
      std::printf("level %zu remeshed %d time(s); flow-map differences undefined\n", l, rep.remesh_counts[l]);
  return 0;
}

int cmd_verify(const std::string& suite) {
  int failed = 0;
  cli::run_suite(suite, [&](const cli::Check& c) {
    std::printf("%s  %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    std::fflush(stdout);
    failed += !c.pass;
  });
  if (failed) std::printf("%d check(s) failed\n", failed);
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ALE finite element solver for two-phase incompressible flow"};
  app.require_subcommand(1);
  double mass_fault_eps = 0.0;
  app.add_option("--inject-mass-fault", mass_fault_eps)->group("");

  std::string config;
  fs::path out_dir = "out";
  int vtk_every = -1;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run a simulation and write bench.csv and manifest.json");
  run_cmd->add_option("config", config, "Configuration file")->required();
  run_cmd->add_option("-o,--output", out_dir, "Output directory");
  run_cmd->add_option("--vtk-every", vtk_every, "Write a VTK snapshot every N steps (0 disables)");
  run_cmd->add_flag("-q,--quiet", quiet, "Suppress progress output");

  int levels = 3, m = 2;
  auto* conv_cmd = app.add_subcommand("converge", "Estimate spatial convergence rates on nested meshes");
  conv_cmd->add_option("config", config, "Configuration file")->required();
  conv_cmd->add_option("--levels", levels, "Number of mesh levels")->check(CLI::Range(3, 8));
  conv_cmd->add_option("-m", m, "Refinement factor")->check(CLI::Range(2, 8));

  std::string suite = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Run the verification suites");
  verify_cmd->add_option("suite", suite, "Suite name")->check(CLI::IsMember(cli::suite_names()));

  CLI11_PARSE(app, argc, argv);
  if (mass_fault_eps != 0.0) set_mass_fault(mass_fault_eps);
  try {
    if (*run_cmd) return cmd_run(config, out_dir, vtk_every, quiet);
    if (*conv_cmd) return cmd_converge(config, levels, m);
    if (*verify_cmd) return cmd_verify(suite);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
