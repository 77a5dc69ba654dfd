#pragma once

#include "alefem/mesh.hpp"

#include <iosfwd>
#include <string>

namespace alefem {

// Gmsh MSH 2.2 ASCII subset. Triangles of type 2, 9 or 21 carry physical
// tag 1 (plus) or 2 (minus); line elements carry 10 (interface) or 20
// (outer boundary). Coordinates are written with round-trip precision.

inline constexpr int kTagPlus = 1;
inline constexpr int kTagMinus = 2;
inline constexpr int kTagInterface = 10;
inline constexpr int kTagBoundary = 20;

Mesh read_msh(const std::string& path);
Mesh read_msh(std::istream& in);
void write_msh(const Mesh& mesh, const std::string& path);
void write_msh(const Mesh& mesh, std::ostream& out);

}  // namespace alefem
