#pragma once

#include <string>
#include <vector>

#include "hpfem/assembly.hpp"

namespace hpfem
{

/// Benchmark problem: -Laplace u = f in the domain, u = g on the boundary.
struct Problem
{
  std::string name;
  DomainShape domain = DomainShape::Square;
  double initial_h = 0.25;
  ScalarField f;
  ScalarField g;  // null: homogeneous boundary data
  ScalarField u;
  VectorField grad_u;
  double energy = 0.0;  // ||grad u||
  int extra_order = default_extra_order;
  ErrorQuadrature error_quadrature;
};

/// (x^2-1)(y^2-1) exp(-100(x^2+y^2)) on (-1,1)^2.
Problem gaussian_problem();

/// r^{2/3} sin(2 phi/3) on the L-shaped domain, f = 0, exact boundary data.
Problem lshape_problem();

/// Laplacian of the Gaussian solution (exposed for tests).
double gaussian_laplacian(const Point &x);

/// Per-triangle boundary-data indicator: ||grad E(g - g_h)||_K, where E extends
/// the projection of the trace residual onto edge modes of degree p_K + 4 on
/// each boundary edge of K. Zero for triangles without boundary edges.
std::vector<double> dirichlet_indicators(const FeFunction &uh, const ScalarField &g);

}  // namespace hpfem
