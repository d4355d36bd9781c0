#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "hpfem/hp_space.hpp"

namespace hpfem
{

using ScalarField = std::function<double(const Point &)>;
using VectorField = std::function<Eigen::Vector2d(const Point &)>;

/// Stiffness/load quadrature order on a degree-p element is 2p + extra_order.
inline constexpr int default_extra_order = 4;

/// Reduced Galerkin system on the free DOFs.
struct LinearSystem
{
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  Eigen::VectorXd dirichlet;  // full-length vector holding the constrained values
};

/// Assembles (grad u, grad v) = (f, v) on the free DOFs with the constrained
/// DOFs fixed to the interpolant of g (g == nullptr means homogeneous).
LinearSystem assemble_system(const HpSpace &space, const ScalarField &f, const ScalarField &g,
                             int extra_order = default_extra_order);

/// Galerkin solution with a sparse Cholesky (LDL^T) factorization.
FeFunction solve_primal(std::shared_ptr<const HpSpace> space, const ScalarField &f,
                        const ScalarField &g = nullptr, int extra_order = default_extra_order);

/// Physical quadrature points of a reference rule on triangle k.
std::vector<Point> physical_points(const Mesh &mesh, int k, std::span<const Eigen::Vector3d> pts);

/// Gradients of u (living on `host`'s mesh) at physical points inside host triangle k.
Eigen::Matrix<double, Eigen::Dynamic, 2> gradients_in_host(const FeFunction &u, int host_k,
                                                            std::span<const Point> xs);

/// Residual lifting on a local space with zero trace on its whole boundary:
/// (grad r, grad v) = (f, v) - (grad u, grad v) for all local v. Every local
/// triangle k lies inside triangle host_triangle[k] of u's mesh.
struct LocalLifting
{
  FeFunction function;
  double norm = 0.0;
  bool empty = false;  // no free DOFs: r = 0
};

LocalLifting solve_patch_dirichlet(std::shared_ptr<const HpSpace> local_space,
                                   std::span<const int> host_triangle, const FeFunction &u,
                                   const ScalarField &f, int extra_order = default_extra_order);

/// ||grad v|| over the given triangles (all when empty); order 2p+extra per element.
double energy_norm(const FeFunction &v, std::span<const int> region = {}, int extra_order = 0);

/// Overkill quadrature settings for errors against exact solutions.
struct ErrorQuadrature
{
  int extra_order = 10;
  double resolution = 0.0;  // subdivide until sub-triangles are below this size
  std::optional<Point> singular_point;
};

/// Per-triangle ||grad(u - u_h)||_K^2.
std::vector<double> energy_error_squared(const FeFunction &uh, const VectorField &grad_exact,
                                         const ErrorQuadrature &quad);

/// Quadrature rule used by energy_error_squared on triangle k (exposed for tests).
struct TriangleRule
{
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
};
TriangleRule error_rule(const Mesh &mesh, int k, int order, const ErrorQuadrature &quad);

}  // namespace hpfem
