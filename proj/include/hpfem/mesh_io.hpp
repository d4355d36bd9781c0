#pragma once

#include <iosfwd>

#include "hpfem/hp_space.hpp"

namespace hpfem
{

/// Plain-text dump:
///   # vertices <n>
///   <id> <x> <y>
///   # triangles <m>
///   <id> <v0> <v1> <v2> <degree>
void write_mesh(std::ostream &os, const Mesh &mesh, const DegreeVector &degrees);

struct MeshWithDegrees
{
  Mesh mesh;
  DegreeVector degrees;
};

/// Reads the format of write_mesh (refinement edges default to local edge 0).
MeshWithDegrees read_mesh(std::istream &is);

}  // namespace hpfem
