#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hpfem
{

using Point = Eigen::Vector2d;

/// A triangle of a conforming mesh. Vertices are stored counterclockwise.
/// Local edge i is the edge opposite local vertex i; `refinement_edge` is the
/// local index of the edge bisected next by newest vertex bisection.
struct Cell
{
  std::array<int, 3> vertices{};
  int refinement_edge = 0;
};

/// Undirected mesh edge. `v0 < v1`; `t1 == -1` marks a boundary edge.
struct Edge
{
  int v0 = -1, v1 = -1;
  int t0 = -1, t1 = -1;
  bool on_boundary() const { return t1 < 0; }
};

struct VertexPatch
{
  int vertex = -1;
  std::vector<int> triangles;  // ascending ids
  bool boundary = false;
};

enum class DomainShape
{
  Square,  // (-1,1)^2
  LShape   // (-1,1)^2 \ [0,1]x[-1,0]
};

/// Immutable conforming triangulation with NVB bookkeeping. A mesh of
/// generation l+1 produced by `bisect` records, for every triangle, the id of
/// its parent in generation l.
class Mesh
{
public:
  Mesh() = default;
  Mesh(std::vector<Point> vertices, std::vector<Cell> cells, int generation = 0,
       std::vector<int> parents = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int generation() const { return generation_; }

  const Point &vertex(int a) const { return vertices_[a]; }
  const Cell &cell(int k) const { return cells_[k]; }
  const std::vector<Point> &vertices() const { return vertices_; }
  const std::vector<Cell> &cells() const { return cells_; }
  const Edge &edge(int e) const { return edges_[e]; }

  /// Parent id in the previous generation, or -1 for an initial mesh.
  int parent(int k) const { return parents_.empty() ? -1 : parents_[k]; }
  bool has_parents() const { return !parents_.empty(); }

  /// Global edge ids of triangle k, ordered by local edge index.
  const std::array<int, 3> &triangle_edges(int k) const { return cell_edges_[k]; }
  std::span<const int> vertex_triangles(int a) const;
  bool is_boundary_vertex(int a) const { return boundary_vertex_[a]; }

  double area(int k) const;
  double diameter(int k) const;
  double min_angle(int k) const;
  double min_angle() const;
  double max_diameter() const;

  /// Edge id for the vertex pair, if it exists.
  std::optional<int> find_edge(int a, int b) const;

private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<int> parents_;
  int generation_ = 0;

  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<int> v2t_offsets_, v2t_;
  std::vector<bool> boundary_vertex_;
};

/// Criss-cross mesh: square cells of side s <= h_max, each split into four
/// triangles by both diagonals. The cell side is the refinement edge.
Mesh build_initial_mesh(DomainShape domain, double h_max);

/// Newest vertex bisection of the flagged triangles with conforming closure.
/// Returns the next generation; every flagged triangle has at least 2 children.
Mesh bisect(const Mesh &mesh, std::span<const int> flagged);

VertexPatch vertex_patch(const Mesh &mesh, int a);

/// A mesh built from a subset of another mesh's triangles.
struct SubMesh
{
  Mesh mesh;
  std::vector<int> host_triangle;  // local triangle -> host triangle
  std::vector<int> host_vertex;    // local vertex -> host vertex
};

/// Extracts the given triangles (keeping orientation and refinement edges).
SubMesh extract_submesh(const Mesh &mesh, std::span<const int> triangles);

/// Local refinement of the patch of vertex a: one bisection of every patch
/// triangle plus patch-internal closure. `host_triangle` of the result maps each
/// child to its parent triangle in `mesh`.
SubMesh refine_patch_local(const Mesh &mesh, int a);

/// Barycentric coordinates of x with respect to triangle k.
Eigen::Vector3d barycentric(const Mesh &mesh, int k, const Point &x);

/// Gradients of the three barycentric functions of triangle k (rows).
Eigen::Matrix<double, 3, 2> barycentric_gradients(const Mesh &mesh, int k);

}  // namespace hpfem
