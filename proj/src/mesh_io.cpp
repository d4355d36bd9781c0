#include "hpfem/mesh_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hpfem
{

void write_mesh(std::ostream &os, const Mesh &mesh, const DegreeVector &degrees)
{
  os << "# vertices " << mesh.num_vertices() << '\n' << std::setprecision(17);
  for (int a = 0; a < mesh.num_vertices(); ++a)
  {
    os << a << ' ' << mesh.vertex(a).x() << ' ' << mesh.vertex(a).y() << '\n';
  }
  os << "# triangles " << mesh.num_triangles() << '\n';
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const auto &v = mesh.cell(k).vertices;
    os << k << ' ' << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << degrees[k] << '\n';
  }
}

MeshWithDegrees read_mesh(std::istream &is)
{
  auto header = [&](const char *what) {
    std::string hash, word;
    int n = -1;
    if (!(is >> hash >> word >> n) || hash != "#" || word != what || n < 0)
    {
      throw std::runtime_error(std::string("read_mesh: expected '# ") + what + " <count>'");
    }
    return n;
  };
  const int nv = header("vertices");
  std::vector<Point> vertices(nv);
  for (int i = 0; i < nv; ++i)
  {
    int id;
    double x, y;
    if (!(is >> id >> x >> y) || id != i)
    {
      throw std::runtime_error("read_mesh: bad vertex record " + std::to_string(i));
    }
    vertices[i] = Point(x, y);
  }
  const int nt = header("triangles");
  std::vector<Cell> cells(nt);
  DegreeVector degrees(nt);
  for (int k = 0; k < nt; ++k)
  {
    int id;
    Cell c;
    if (!(is >> id >> c.vertices[0] >> c.vertices[1] >> c.vertices[2] >> degrees[k]) || id != k)
    {
      throw std::runtime_error("read_mesh: bad triangle record " + std::to_string(k));
    }
    c.refinement_edge = 0;
    cells[k] = c;
  }
  return {Mesh(std::move(vertices), std::move(cells)), std::move(degrees)};
}

}  // namespace hpfem
