#include "hpfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace hpfem
{

namespace
{

double cross(const Point &a, const Point &b)
{
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Cell> cells, int generation,
           std::vector<int> parents)
  : vertices_(std::move(vertices)), cells_(std::move(cells)), parents_(std::move(parents)),
    generation_(generation)
{
  if (!parents_.empty() && parents_.size() != cells_.size())
  {
    throw std::invalid_argument("Mesh: parent map size does not match triangle count");
  }
  for (const auto &c : cells_)
  {
    for (int v : c.vertices)
    {
      if (v < 0 || v >= num_vertices())
      {
        throw std::invalid_argument("Mesh: triangle references unknown vertex");
      }
    }
    if (c.refinement_edge < 0 || c.refinement_edge > 2)
    {
      throw std::invalid_argument("Mesh: refinement edge index out of range");
    }
  }
  build_topology();
}

void Mesh::build_topology()
{
  const int nt = num_triangles();
  const int nv = num_vertices();

  std::map<std::pair<int, int>, int> edge_ids;
  cell_edges_.assign(nt, {-1, -1, -1});
  edges_.clear();
  for (int k = 0; k < nt; ++k)
  {
    const auto &v = cells_[k].vertices;
    if (cross(vertices_[v[1]] - vertices_[v[0]], vertices_[v[2]] - vertices_[v[0]]) <= 0.0)
    {
      throw std::invalid_argument("Mesh: triangle " + std::to_string(k) +
                                  " is not counterclockwise");
    }
    for (int i = 0; i < 3; ++i)
    {
      int a = v[(i + 1) % 3], b = v[(i + 2) % 3];
      auto key = std::minmax(a, b);
      auto [it, inserted] = edge_ids.try_emplace({key.first, key.second},
                                                 static_cast<int>(edges_.size()));
      if (inserted)
      {
        edges_.push_back({key.first, key.second, k, -1});
      }
      else
      {
        auto &e = edges_[it->second];
        if (e.t1 >= 0)
        {
          throw std::invalid_argument("Mesh: edge shared by more than two triangles");
        }
        e.t1 = k;
      }
      cell_edges_[k][i] = it->second;
    }
  }

  v2t_offsets_.assign(nv + 1, 0);
  for (const auto &c : cells_)
  {
    for (int v : c.vertices)
    {
      ++v2t_offsets_[v + 1];
    }
  }
  for (int a = 0; a < nv; ++a)
  {
    v2t_offsets_[a + 1] += v2t_offsets_[a];
  }
  v2t_.assign(v2t_offsets_.back(), -1);
  std::vector<int> fill(v2t_offsets_.begin(), v2t_offsets_.end() - 1);
  for (int k = 0; k < nt; ++k)
  {
    for (int v : cells_[k].vertices)
    {
      v2t_[fill[v]++] = k;
    }
  }

  boundary_vertex_.assign(nv, false);
  for (const auto &e : edges_)
  {
    if (e.on_boundary())
    {
      boundary_vertex_[e.v0] = true;
      boundary_vertex_[e.v1] = true;
    }
  }
}

std::span<const int> Mesh::vertex_triangles(int a) const
{
  return {v2t_.data() + v2t_offsets_[a],
          static_cast<std::size_t>(v2t_offsets_[a + 1] - v2t_offsets_[a])};
}

double Mesh::area(int k) const
{
  const auto &v = cells_[k].vertices;
  return 0.5 * cross(vertices_[v[1]] - vertices_[v[0]], vertices_[v[2]] - vertices_[v[0]]);
}

double Mesh::diameter(int k) const
{
  const auto &v = cells_[k].vertices;
  return std::max({(vertices_[v[0]] - vertices_[v[1]]).norm(),
                   (vertices_[v[1]] - vertices_[v[2]]).norm(),
                   (vertices_[v[2]] - vertices_[v[0]]).norm()});
}

double Mesh::min_angle(int k) const
{
  const auto &v = cells_[k].vertices;
  double result = std::numbers::pi;
  for (int i = 0; i < 3; ++i)
  {
    Point a = vertices_[v[(i + 1) % 3]] - vertices_[v[i]];
    Point b = vertices_[v[(i + 2) % 3]] - vertices_[v[i]];
    double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
    result = std::min(result, std::acos(c));
  }
  return result;
}

double Mesh::min_angle() const
{
  double result = std::numbers::pi;
  for (int k = 0; k < num_triangles(); ++k)
  {
    result = std::min(result, min_angle(k));
  }
  return result;
}

double Mesh::max_diameter() const
{
  double result = 0.0;
  for (int k = 0; k < num_triangles(); ++k)
  {
    result = std::max(result, diameter(k));
  }
  return result;
}

std::optional<int> Mesh::find_edge(int a, int b) const
{
  if (a < 0 || a >= num_vertices() || b < 0 || b >= num_vertices())
  {
    return std::nullopt;
  }
  for (int k : vertex_triangles(a))
  {
    for (int i = 0; i < 3; ++i)
    {
      const auto &e = edges_[cell_edges_[k][i]];
      if ((e.v0 == a && e.v1 == b) || (e.v0 == b && e.v1 == a))
      {
        return cell_edges_[k][i];
      }
    }
  }
  return std::nullopt;
}

Mesh build_initial_mesh(DomainShape domain, double h_max)
{
  if (!(h_max > 0.0))
  {
    throw std::invalid_argument("build_initial_mesh: h_max must be positive");
  }
  // Triangle diameter equals the cell side.
  int n = static_cast<int>(std::ceil(2.0 / h_max - 1e-12));
  n = std::max(n, 1);
  if (domain == DomainShape::LShape && n % 2 == 1)
  {
    ++n;
  }
  const double s = 2.0 / n;

  auto cell_kept = [&](int i, int j) {
    if (domain == DomainShape::Square)
    {
      return true;
    }
    // drop cells inside [0,1]x[-1,0]
    return !(i >= n / 2 && j < n / 2);
  };

  std::vector<Point> vertices;
  std::vector<int> node_id((n + 1) * (n + 1), -1);
  auto node = [&](int i, int j) {
    int &id = node_id[j * (n + 1) + i];
    if (id < 0)
    {
      id = static_cast<int>(vertices.size());
      vertices.emplace_back(-1.0 + i * s, -1.0 + j * s);
    }
    return id;
  };

  std::vector<Cell> cells;
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      if (!cell_kept(i, j))
      {
        continue;
      }
      int c00 = node(i, j), c10 = node(i + 1, j), c11 = node(i + 1, j + 1),
          c01 = node(i, j + 1);
      int c = static_cast<int>(vertices.size());
      vertices.emplace_back(-1.0 + (i + 0.5) * s, -1.0 + (j + 0.5) * s);
      cells.push_back({{c, c00, c10}, 0});
      cells.push_back({{c, c10, c11}, 0});
      cells.push_back({{c, c11, c01}, 0});
      cells.push_back({{c, c01, c00}, 0});
    }
  }
  return Mesh(std::move(vertices), std::move(cells));
}

Mesh bisect(const Mesh &mesh, std::span<const int> flagged)
{
  const int nt = mesh.num_triangles();
  std::vector<char> marked(mesh.num_edges(), 0);
  std::vector<int> work;
  auto mark = [&](int e) {
    if (!marked[e])
    {
      marked[e] = 1;
      work.push_back(e);
    }
  };
  for (int k : flagged)
  {
    if (k < 0 || k >= nt)
    {
      throw std::out_of_range("bisect: unknown triangle id " + std::to_string(k));
    }
    mark(mesh.triangle_edges(k)[mesh.cell(k).refinement_edge]);
  }
  // Closure: a triangle with any marked edge must have its refinement edge marked.
  while (!work.empty())
  {
    int e = work.back();
    work.pop_back();
    for (int t : {mesh.edge(e).t0, mesh.edge(e).t1})
    {
      if (t >= 0)
      {
        mark(mesh.triangle_edges(t)[mesh.cell(t).refinement_edge]);
      }
    }
  }

  std::vector<Point> vertices = mesh.vertices();
  std::map<std::pair<int, int>, int> midpoint;
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    if (marked[e])
    {
      const auto &ed = mesh.edge(e);
      midpoint[{ed.v0, ed.v1}] = static_cast<int>(vertices.size());
      vertices.push_back(0.5 * (mesh.vertex(ed.v0) + mesh.vertex(ed.v1)));
    }
  }

  std::vector<Cell> cells;
  std::vector<int> parents;
  cells.reserve(nt);
  parents.reserve(nt);
  auto refine = [&](auto &&self, const Cell &c, int parent) -> void {
    const int r = c.refinement_edge;
    const int apex = c.vertices[r];
    const int a = c.vertices[(r + 1) % 3];
    const int b = c.vertices[(r + 2) % 3];
    auto key = std::minmax(a, b);
    auto it = midpoint.find({key.first, key.second});
    if (it == midpoint.end())
    {
      cells.push_back(c);
      parents.push_back(parent);
      return;
    }
    const int m = it->second;
    self(self, Cell{{apex, a, m}, 2}, parent);
    self(self, Cell{{apex, m, b}, 1}, parent);
  };
  for (int k = 0; k < nt; ++k)
  {
    refine(refine, mesh.cell(k), k);
  }
  return Mesh(std::move(vertices), std::move(cells), mesh.generation() + 1,
              std::move(parents));
}

VertexPatch vertex_patch(const Mesh &mesh, int a)
{
  if (a < 0 || a >= mesh.num_vertices())
  {
    throw std::out_of_range("vertex_patch: unknown vertex id " + std::to_string(a));
  }
  VertexPatch patch;
  patch.vertex = a;
  auto tris = mesh.vertex_triangles(a);
  patch.triangles.assign(tris.begin(), tris.end());
  std::sort(patch.triangles.begin(), patch.triangles.end());
  patch.boundary = mesh.is_boundary_vertex(a);
  return patch;
}

SubMesh extract_submesh(const Mesh &mesh, std::span<const int> triangles)
{
  SubMesh sub;
  std::map<int, int> local_vertex;
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  for (int k : triangles)
  {
    if (k < 0 || k >= mesh.num_triangles())
    {
      throw std::out_of_range("extract_submesh: unknown triangle id");
    }
    Cell c = mesh.cell(k);
    for (int &v : c.vertices)
    {
      auto [it, inserted] = local_vertex.try_emplace(v, static_cast<int>(vertices.size()));
      if (inserted)
      {
        vertices.push_back(mesh.vertex(v));
        sub.host_vertex.push_back(v);
      }
      v = it->second;
    }
    cells.push_back(c);
    sub.host_triangle.push_back(k);
  }
  sub.mesh = Mesh(std::move(vertices), std::move(cells), mesh.generation());
  return sub;
}

SubMesh refine_patch_local(const Mesh &mesh, int a)
{
  VertexPatch patch = vertex_patch(mesh, a);
  SubMesh local = extract_submesh(mesh, patch.triangles);
  std::vector<int> all(local.mesh.num_triangles());
  for (int k = 0; k < local.mesh.num_triangles(); ++k)
  {
    all[k] = k;
  }
  Mesh refined = bisect(local.mesh, all);

  SubMesh result;
  result.host_triangle.resize(refined.num_triangles());
  for (int k = 0; k < refined.num_triangles(); ++k)
  {
    result.host_triangle[k] = local.host_triangle[refined.parent(k)];
  }
  result.host_vertex.assign(refined.num_vertices(), -1);
  for (int v = 0; v < local.mesh.num_vertices(); ++v)
  {
    result.host_vertex[v] = local.host_vertex[v];
  }
  result.mesh = std::move(refined);
  return result;
}

Eigen::Vector3d barycentric(const Mesh &mesh, int k, const Point &x)
{
  const auto &v = mesh.cell(k).vertices;
  const Point &p0 = mesh.vertex(v[0]);
  const Point &p1 = mesh.vertex(v[1]);
  const Point &p2 = mesh.vertex(v[2]);
  const double det = cross(p1 - p0, p2 - p0);
  const double l1 = cross(x - p0, p2 - p0) / det;
  const double l2 = cross(p1 - p0, x - p0) / det;
  return {1.0 - l1 - l2, l1, l2};
}

Eigen::Matrix<double, 3, 2> barycentric_gradients(const Mesh &mesh, int k)
{
  const auto &v = mesh.cell(k).vertices;
  const double two_area = 2.0 * mesh.area(k);
  Eigen::Matrix<double, 3, 2> g;
  for (int i = 0; i < 3; ++i)
  {
    Point t = mesh.vertex(v[(i + 2) % 3]) - mesh.vertex(v[(i + 1) % 3]);
    g(i, 0) = -t.y() / two_area;
    g(i, 1) = t.x() / two_area;
  }
  return g;
}

}  // namespace hpfem
