#pragma once

#include <vector>

#include <Eigen/Core>

namespace hpfem
{

/// Gauss-Legendre rule on [-1,1].
struct GaussLegendre
{
  std::vector<double> points;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

/// Rule on the reference triangle {(x,y): x,y >= 0, x+y <= 1}. Points are
/// stored as barycentric coordinates (l0, l1, l2) with x = l1, y = l2.
struct QuadratureRule
{
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;  // sum = 1/2
  int order = 0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Collapsed (Duffy) Gauss rule exact for polynomials of total degree <= order.
/// Rules are cached; the returned reference stays valid for the program lifetime.
const QuadratureRule &triangle_rule(int order);

/// Composite rule: the reference triangle uniformly split `levels` times
/// into 4^levels subtriangles, each with `triangle_rule(order)`.
QuadratureRule composite_triangle_rule(int order, int levels);

/// Rule for integrands with a point singularity at reference vertex 0.
/// Uses the Duffy collapse towards vertex 0 and a geometrically graded
/// composite Gauss rule in the radial variable.
QuadratureRule vertex_graded_rule(int order, int layers, double ratio = 0.35);

}  // namespace hpfem
