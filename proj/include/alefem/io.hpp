#pragma once

#include "alefem/stepper.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace alefem {

/// Parses flat `key = value` text. `[section]` headers group keys for
/// readability only; every key is global. `#` starts a comment.
///
/// Required: rho_plus rho_minus mu_plus mu_minus g k h tau T.
/// Optional: rect (x0 y0 x1 y1), circle_center (x y), circle_radius,
/// remesh_angle, body_force_weighted_by_rho, pressure (discontinuous or
/// continuous), vtk_every.
SimConfig parse_config(std::istream& in);
SimConfig load_config(const std::filesystem::path& path);

/// Round-trip shortest decimal form; identical inputs give identical text.
std::string format_number(double v);

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const BenchmarkRecord& r);

/// Legacy ASCII unstructured grid; each curved element is split into k^2
/// straight sub-triangles. Point data: velocity, mesh velocity, pressure.
void write_vtk(const std::filesystem::path& path, const State& state);

}  // namespace alefem
