#include "alefem/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace alefem {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& key, const std::string& value, std::size_t count, int line) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ParseError("config key '" + key + "': '" + tok + "' is not a number", line);
    out.push_back(v);
  }
  if (out.size() != count)
    throw ParseError("config key '" + key + "' expects " + std::to_string(count) + " number(s), got " +
                         std::to_string(out.size()),
                     line);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("config key '" + key + "' expects true or false, got '" + value + "'", line);
}

const std::vector<std::string> kRequired = {"rho_plus", "rho_minus", "mu_plus", "mu_minus", "g",
                                            "k",        "h",         "tau",     "T"};

}  // namespace

SimConfig parse_config(std::istream& in) {
  SimConfig c;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line);
    if (!seen.insert(key).second) throw ParseError("config key '" + key + "' given twice", line);
    auto num = [&] { return parse_numbers(key, value, 1, line)[0]; };

    if (key == "rho_plus") c.params.rho_plus = num();
    else if (key == "rho_minus") c.params.rho_minus = num();
    else if (key == "mu_plus") c.params.mu_plus = num();
    else if (key == "mu_minus") c.params.mu_minus = num();
    else if (key == "g") c.params.g = num();
    else if (key == "h") c.h = num();
    else if (key == "tau") c.tau = num();
    else if (key == "T") c.T = num();
    else if (key == "circle_radius") c.circle_radius = num();
    else if (key == "remesh_angle") c.remesh_angle = num();
    else if (key == "k" || key == "vtk_every") {
      const double v = num();
      if (v != static_cast<int>(v)) throw ParseError("config key '" + key + "' must be an integer", line);
      (key == "k" ? c.k : c.vtk_every) = static_cast<int>(v);
    } else if (key == "rect") {
      const auto v = parse_numbers(key, value, 4, line);
      c.rect = Rect{v[0], v[1], v[2], v[3]};
    } else if (key == "circle_center") {
      const auto v = parse_numbers(key, value, 2, line);
      c.circle_center = Vec2(v[0], v[1]);
    } else if (key == "body_force_weighted_by_rho") {
      c.body_force_weighted_by_rho = parse_bool(key, value, line);
    } else if (key == "pressure") {
      if (value == "discontinuous") c.pressure = Continuity::SubdomainDiscontinuous;
      else if (value == "continuous") c.pressure = Continuity::Global;
      else throw ParseError("config key 'pressure' expects discontinuous or continuous", line);
    } else {
      throw ParseError("unknown config key '" + key + "'", line);
    }
  }
  for (const auto& key : kRequired)
    if (!seen.count(key)) throw Error("missing required config key '" + key + "'");
  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  try {
    return parse_config(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {"t",     "circularity", "com_x",      "com_y",
                                                "rise_velocity", "e_kin", "e_pot", "e_tot",
                                                "area_minus", "min_angle", "remesh_count"};
  return cols;
}

std::string csv_header() {
  std::string s;
  for (const auto& c : csv_columns()) s += (s.empty() ? "" : ",") + c;
  return s;
}

std::string csv_row(const BenchmarkRecord& r) {
  const double v[] = {r.t,           r.circularity,   r.center_of_mass.x(), r.center_of_mass.y(),
                      r.rise_velocity, r.kinetic_energy, r.potential_energy, r.total_energy,
                      r.area_minus,  r.min_angle};
  std::string s;
  for (double x : v) s += format_number(x) + ",";
  return s + std::to_string(r.remesh_count);
}

void write_vtk(const std::filesystem::path& path, const State& state) {
  const Mesh& mesh = state.mesh;
  const int k = mesh.degree();
  const int per = (k + 1) * (k + 2) / 2;
  std::vector<Vec2> lattice;
  std::map<std::pair<int, int>, int> index;
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i + j <= k; ++i) {
      index[{i, j}] = static_cast<int>(lattice.size());
      lattice.emplace_back(static_cast<double>(i) / k, static_cast<double>(j) / k);
    }
  std::vector<std::array<int, 3>> sub;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i + j < k; ++i) {
      sub.push_back({index[{i, j}], index[{i + 1, j}], index[{i, j + 1}]});
      if (i + j + 1 < k) sub.push_back({index[{i + 1, j}], index[{i + 1, j + 1}], index[{i, j + 1}]});
    }

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const int ne = mesh.num_elements();
  const int np = ne * per;
  const int nc = ne * static_cast<int>(sub.size());
  std::ostringstream pts, vel, mvel, pres;
  for (int e = 0; e < ne; ++e)
    for (const Vec2& r : lattice) {
      const Location loc{e, r, 0.0};
      const Vec2 x = element_map_unchecked(mesh, e, r).x;
      const Vec2 u = evaluate_vector_at(state.spaces.velocity, state.u, loc);
      const Vec2 w = evaluate_vector_at(state.spaces.velocity, state.w, loc);
      pts << format_number(x.x()) << ' ' << format_number(x.y()) << " 0\n";
      vel << format_number(u.x()) << ' ' << format_number(u.y()) << " 0\n";
      mvel << format_number(w.x()) << ' ' << format_number(w.y()) << " 0\n";
      pres << format_number(evaluate_at(state.spaces.pressure, state.p, loc)) << '\n';
    }
  out << "# vtk DataFile Version 3.0\nt = " << format_number(state.t) << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n" << pts.str();
  out << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (int e = 0; e < ne; ++e)
    for (const auto& s : sub) out << "3 " << e * per + s[0] << ' ' << e * per + s[1] << ' ' << e * per + s[2] << '\n';
  out << "CELL_TYPES " << nc << '\n';
  for (int i = 0; i < nc; ++i) out << "5\n";
  out << "CELL_DATA " << nc << "\nSCALARS phase int 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e)
    for (std::size_t s = 0; s < sub.size(); ++s) out << (mesh.phase(e) == Phase::Plus ? 1 : 2) << '\n';
  out << "POINT_DATA " << np << "\nVECTORS velocity double\n" << vel.str();
  out << "VECTORS mesh_velocity double\n" << mvel.str();
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n" << pres.str();
}

}  // namespace alefem
