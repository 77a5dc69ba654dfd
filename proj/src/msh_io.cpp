#include "alefem/msh_io.hpp"

#include <charconv>
#include <fstream>
#include <unordered_map>

namespace alefem {
namespace {

int triangle_degree(int type) {
  switch (type) {
    case 2: return 1;
    case 9: return 2;
    case 21: return 3;
    default: return 0;
  }
}

int line_type(int degree) { return degree == 1 ? 1 : (degree == 2 ? 8 : 26); }
int triangle_type(int degree) { return degree == 1 ? 2 : (degree == 2 ? 9 : 21); }

// Local node permutation that reverses the orientation of a triangle.
const std::vector<int>& reversal(int degree) {
  static const std::vector<int> p1{0, 2, 1};
  static const std::vector<int> p2{0, 2, 1, 5, 4, 3};
  static const std::vector<int> p3{0, 2, 1, 8, 7, 6, 5, 4, 3, 9};
  return degree == 1 ? p1 : (degree == 2 ? p2 : p3);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }
  std::string require(const char* context) {
    std::string line;
    if (!next(line)) throw ParseError(std::string("unexpected end of file in ") + context, number_);
    return line;
  }
  long number() const { return number_; }

 private:
  std::istream& in_;
  long number_ = 0;
};

template <class T>
std::vector<T> split_numbers(const std::string& line, long lineno) {
  std::vector<T> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p == end) break;
    T v{};
    auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) throw ParseError("malformed number in '" + line + "'", lineno);
    out.push_back(v);
    p = res.ptr;
    if (p < end && *p != ' ' && *p != '\t') throw ParseError("malformed number in '" + line + "'", lineno);
  }
  return out;
}

// The line number must be taken after the read.
template <class T>
std::vector<T> read_numbers(LineReader& r, const char* context) {
  const std::string line = r.require(context);
  return split_numbers<T>(line, r.number());
}

void expect(LineReader& r, const char* tag) {
  const std::string line = r.require(tag);
  if (line.rfind(tag, 0) != 0) throw ParseError(std::string("expected ") + tag + ", found '" + line + "'", r.number());
}

}  // namespace

Mesh read_msh(std::istream& in) {
  LineReader r(in);
  std::vector<double> coords;
  std::unordered_map<long, int> node_index;
  std::vector<int> conn;
  std::vector<Phase> phases;
  int degree = 0;
  bool have_format = false, have_nodes = false, have_elements = false;

  std::string line;
  while (r.next(line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      auto f = read_numbers<double>(r, "$MeshFormat");
      if (f.size() < 3 || f[0] < 2.0 || f[0] >= 3.0)
        throw ParseError("only MSH format 2.x is supported", r.number());
      if (f[1] != 0.0) throw ParseError("binary MSH files are not supported", r.number());
      expect(r, "$EndMeshFormat");
      have_format = true;
    } else if (line.rfind("$Nodes", 0) == 0) {
      auto n = read_numbers<long>(r, "$Nodes");
      if (n.size() != 1 || n[0] < 0) throw ParseError("invalid node count", r.number());
      coords.reserve(2 * n[0]);
      for (long i = 0; i < n[0]; ++i) {
        auto xyz = read_numbers<double>(r, "$Nodes");
        if (xyz.size() != 4) throw ParseError("node line needs id and 3 coordinates", r.number());
        const long id = static_cast<long>(xyz[0]);
        if (static_cast<double>(id) != xyz[0]) throw ParseError("non-integer node id", r.number());
        if (!node_index.emplace(id, static_cast<int>(i)).second)
          throw ParseError("duplicate node id " + std::to_string(id), r.number());
        coords.push_back(xyz[1]);
        coords.push_back(xyz[2]);
      }
      expect(r, "$EndNodes");
      have_nodes = true;
    } else if (line.rfind("$Elements", 0) == 0) {
      if (!have_nodes) throw ParseError("$Elements before $Nodes", r.number());
      auto n = read_numbers<long>(r, "$Elements");
      if (n.size() != 1 || n[0] < 0) throw ParseError("invalid element count", r.number());
      for (long i = 0; i < n[0]; ++i) {
        auto v = read_numbers<long>(r, "$Elements");
        if (v.size() < 3 || v.size() < 3 + static_cast<std::size_t>(v[2]))
          throw ParseError("malformed element line", r.number());
        const int type = static_cast<int>(v[1]);
        const int ntags = static_cast<int>(v[2]);
        if (type == 15 || type == 1 || type == 8 || type == 26) continue;  // points and lines
        const int k = triangle_degree(type);
        if (k == 0) throw ParseError("unsupported element type " + std::to_string(type), r.number());
        if (degree == 0) degree = k;
        if (k != degree) throw ParseError("mixed triangle degrees", r.number());
        const std::size_t npe = (k + 1) * (k + 2) / 2;
        if (v.size() != 3 + ntags + npe) throw ParseError("wrong node count for element type", r.number());
        if (ntags < 1) throw ParseError("missing phase tag on triangle", r.number());
        const long tag = v[3];
        if (tag != kTagPlus && tag != kTagMinus)
          throw ParseError("missing phase tag on triangle (physical tag " + std::to_string(tag) + ")", r.number());
        std::vector<int> local(npe);
        for (std::size_t j = 0; j < npe; ++j) {
          auto it = node_index.find(v[3 + ntags + j]);
          if (it == node_index.end()) throw ParseError("unknown node id " + std::to_string(v[3 + ntags + j]), r.number());
          local[j] = it->second;
        }
        auto at = [&](int j) { return Vec2(coords[2 * local[j]], coords[2 * local[j] + 1]); };
        const Vec2 a = at(1) - at(0), b = at(2) - at(0);
        if (a.x() * b.y() - a.y() * b.x() < 0.0) {
          std::vector<int> flipped(npe);
          for (std::size_t j = 0; j < npe; ++j) flipped[j] = local[reversal(k)[j]];
          local = std::move(flipped);
        }
        conn.insert(conn.end(), local.begin(), local.end());
        phases.push_back(tag == kTagPlus ? Phase::Plus : Phase::Minus);
      }
      expect(r, "$EndElements");
      have_elements = true;
    } else if (line.rfind("$", 0) == 0) {
      // skip unknown sections such as $PhysicalNames
      const std::string end = "$End" + line.substr(1);
      std::string l;
      while (true) {
        l = r.require(line.c_str());
        if (l.rfind(end, 0) == 0) break;
      }
    } else {
      throw ParseError("unexpected content '" + line + "'", r.number());
    }
  }
  if (!have_format) throw ParseError("missing $MeshFormat section", r.number());
  if (!have_elements || phases.empty()) throw ParseError("no triangles found", r.number());
  return Mesh(degree, std::move(coords), std::move(conn), std::move(phases));
}

Mesh read_msh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  return read_msh(in);
}

void write_msh(const Mesh& mesh, std::ostream& out) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.num_nodes() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 p = mesh.node(i);
    out << i + 1 << ' ' << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
  }
  out << "$EndNodes\n";
  const auto& iface = mesh.interface_edges();
  const auto& bdry = mesh.boundary_edges();
  out << "$Elements\n" << iface.size() + bdry.size() + mesh.num_elements() << "\n";
  long id = 1;
  auto write_edges = [&](const std::vector<EdgeRef>& edges, int tag) {
    for (const auto& e : edges) {
      out << id++ << ' ' << line_type(mesh.degree()) << " 2 " << tag << ' ' << tag;
      for (int n : edge_node_ids(mesh, e)) out << ' ' << n + 1;
      out << '\n';
    }
  };
  write_edges(iface, kTagInterface);
  write_edges(bdry, kTagBoundary);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int tag = mesh.phase(e) == Phase::Plus ? kTagPlus : kTagMinus;
    out << id++ << ' ' << triangle_type(mesh.degree()) << " 2 " << tag << ' ' << tag;
    for (int n : mesh.element_nodes(e)) out << ' ' << n + 1;
    out << '\n';
  }
  out << "$EndElements\n";
}

void write_msh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file '" + path + "'");
  write_msh(mesh, out);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace alefem
