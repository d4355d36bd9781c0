#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hpfem/mesh.hpp"
#include "hpfem/shape.hpp"

namespace hpfem
{

/// Polynomial degree per triangle, every entry >= 1.
using DegreeVector = std::vector<int>;

/// Conforming variable-degree space P_p(T) with the minimum rule on edges.
/// DOF layout: one per vertex (id = vertex id), then edge modes, then
/// interior bubbles. DOFs supported on boundary vertices or edges are
/// constrained (Dirichlet).
class HpSpace
{
public:
  HpSpace(std::shared_ptr<const Mesh> mesh, DegreeVector degrees);

  const Mesh &mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh> &mesh_ptr() const { return mesh_; }
  const DegreeVector &degrees() const { return degrees_; }
  int degree(int k) const { return degrees_[k]; }
  int max_degree() const;

  int dimension() const { return dimension_; }
  int num_free() const { return num_free_; }
  bool is_constrained(int dof) const { return constrained_[dof]; }
  /// Free index of a DOF, or -1 when constrained.
  int free_index(int dof) const { return free_index_[dof]; }
  const std::vector<int> &free_dofs() const { return free_dofs_; }

  int edge_degree(int e) const { return edge_degree_[e]; }
  /// First DOF of the modes of edge e (count edge_degree(e) - 1).
  int edge_dof_offset(int e) const { return edge_offset_[e]; }
  int interior_dof_offset(int k) const { return interior_offset_[k]; }

  const ElementShape &shape(int k) const { return shapes_[k]; }
  /// Global DOF ids of triangle k in local shape ordering.
  std::span<const int> local_dofs(int k) const
  {
    return {local_dofs_.data() + local_offset_[k],
            static_cast<std::size_t>(local_offset_[k + 1] - local_offset_[k])};
  }

private:
  std::shared_ptr<const Mesh> mesh_;
  DegreeVector degrees_;
  std::vector<int> edge_degree_, edge_offset_, interior_offset_;
  std::vector<ElementShape> shapes_;
  std::vector<int> local_offset_, local_dofs_;
  std::vector<bool> constrained_;
  std::vector<int> free_index_, free_dofs_;
  int dimension_ = 0;
  int num_free_ = 0;
};

/// Values and physical gradients of the shape functions of one triangle at a
/// set of barycentric points; rows are local basis functions, columns points.
struct ElementTabulation
{
  Eigen::MatrixXd values, dx, dy;
};

ElementTabulation tabulate(const HpSpace &space, int k, std::span<const Eigen::Vector3d> points);

/// Discrete function: space plus coefficient vector over all DOFs.
class FeFunction
{
public:
  explicit FeFunction(std::shared_ptr<const HpSpace> space);
  FeFunction(std::shared_ptr<const HpSpace> space, Eigen::VectorXd coefficients);

  const HpSpace &space() const { return *space_; }
  const std::shared_ptr<const HpSpace> &space_ptr() const { return space_; }
  const Eigen::VectorXd &coefficients() const { return coefficients_; }
  Eigen::VectorXd &coefficients() { return coefficients_; }

  /// Local coefficient vector of triangle k in shape ordering.
  Eigen::VectorXd local_coefficients(int k) const;
  double value(int k, const Eigen::Vector3d &lambda) const;
  Eigen::Vector2d gradient(int k, const Eigen::Vector3d &lambda) const;
  /// Point evaluation with a linear search for the containing triangle.
  double operator()(const Point &x) const;
  Eigen::Vector2d gradient_at(const Point &x) const;

private:
  std::shared_ptr<const HpSpace> space_;
  Eigen::VectorXd coefficients_;
};

/// Locates a triangle containing x (tolerance 1e-12 in barycentric terms).
int locate(const Mesh &mesh, const Point &x);

/// f(k, x): value at physical point x inside triangle k.
using ElementFunction = std::function<double(int, const Point &)>;

/// Projection-based interpolation: exact vertex values, L2 projection of the
/// trace remainder onto the edge modes, L2 projection of the interior remainder
/// onto the bubbles. With `boundary_only` only constrained DOFs are filled.
Eigen::VectorXd interpolate(const HpSpace &space, const ElementFunction &f,
                            bool boundary_only = false, int extra_order = 8);

/// Hat function of vertex a as a member of `space`.
FeFunction hat_function(std::shared_ptr<const HpSpace> space, int a);

/// Re-represents a function of V_l in the nested space V_{l+1}. The fine mesh
/// must be the coarse mesh itself or its direct refinement (parent map), and
/// degrees must not decrease.
FeFunction embed(const FeFunction &coarse, std::shared_ptr<const HpSpace> fine_space);

}  // namespace hpfem
