#include "hpfem/problems.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hpfem/quadrature.hpp"

namespace hpfem
{

namespace
{

// Values from tools/reference_norms.py.
constexpr double gaussian_energy = 1.7724869740543395262;
constexpr double lshape_energy = 1.3550744119328512486;

double gaussian_u(const Point &x)
{
  const double a = x.x() * x.x() - 1.0, b = x.y() * x.y() - 1.0;
  return a * b * std::exp(-100.0 * (x.x() * x.x() + x.y() * x.y()));
}

Eigen::Vector2d gaussian_grad(const Point &x)
{
  const double a = x.x() * x.x() - 1.0, b = x.y() * x.y() - 1.0;
  const double e = std::exp(-100.0 * (x.x() * x.x() + x.y() * x.y()));
  return {b * e * (2.0 * x.x() - 200.0 * x.x() * a), a * e * (2.0 * x.y() - 200.0 * x.y() * b)};
}

double polar_angle(const Point &x)
{
  const double t = std::atan2(x.y(), x.x());
  return t < 0.0 ? t + 2.0 * std::numbers::pi : t;
}

double lshape_u(const Point &x)
{
  const double r = x.norm();
  return r == 0.0 ? 0.0 : std::pow(r, 2.0 / 3.0) * std::sin(2.0 * polar_angle(x) / 3.0);
}

Eigen::Vector2d lshape_grad(const Point &x)
{
  const double r = x.norm();
  if (r == 0.0)
  {
    return {0.0, 0.0};
  }
  const double phi = polar_angle(x);
  const double c = 2.0 / 3.0 * std::pow(r, -1.0 / 3.0);
  return {-c * std::sin(phi / 3.0), c * std::cos(phi / 3.0)};
}

}  // namespace

double gaussian_laplacian(const Point &x)
{
  const double a = x.x() * x.x() - 1.0, b = x.y() * x.y() - 1.0;
  const double xx = x.x() * x.x(), yy = x.y() * x.y();
  const double e = std::exp(-100.0 * (xx + yy));
  const double uxx = b * e * (2.0 - 200.0 * a - 800.0 * xx + 40000.0 * xx * a);
  const double uyy = a * e * (2.0 - 200.0 * b - 800.0 * yy + 40000.0 * yy * b);
  return uxx + uyy;
}

Problem gaussian_problem()
{
  Problem p;
  p.name = "gaussian";
  p.domain = DomainShape::Square;
  p.initial_h = 0.25;
  p.f = [](const Point &x) { return -gaussian_laplacian(x); };
  p.u = gaussian_u;
  p.grad_u = gaussian_grad;
  p.energy = gaussian_energy;
  p.extra_order = default_extra_order + 6;
  p.error_quadrature.extra_order = 10;
  p.error_quadrature.resolution = 0.0625;
  return p;
}

Problem lshape_problem()
{
  Problem p;
  p.name = "lshape";
  p.domain = DomainShape::LShape;
  p.initial_h = 0.25;
  p.f = [](const Point &) { return 0.0; };
  p.g = lshape_u;
  p.u = lshape_u;
  p.grad_u = lshape_grad;
  p.energy = lshape_energy;
  p.error_quadrature.extra_order = 10;
  p.error_quadrature.resolution = 0.125;
  p.error_quadrature.singular_point = Point(0.0, 0.0);
  return p;
}

std::vector<double> dirichlet_indicators(const FeFunction &uh, const ScalarField &g)
{
  const HpSpace &space = uh.space();
  const Mesh &mesh = space.mesh();
  std::vector<double> eta(mesh.num_triangles(), 0.0);
  if (!g)
  {
    return eta;
  }
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const auto &edges = mesh.triangle_edges(k);
    const auto &v = mesh.cell(k).vertices;
    const Eigen::Matrix<double, 3, 2> dl = barycentric_gradients(mesh, k);
    for (int i = 0; i < 3; ++i)
    {
      if (!mesh.edge(edges[i]).on_boundary())
      {
        continue;
      }
      const int q = space.degree(k) + 4;
      ElementShape ext;
      ext.degree = q;
      ext.edge_degree = {1, 1, 1};
      ext.edge_degree[i] = q;
      ext.edge_reversed[i] = v[(i + 1) % 3] > v[(i + 2) % 3];
      const int off = ext.edge_offset(i);
      const int nm = q - 1;
      const int nloc = ext.size();

      // L2 projection of the trace residual onto the edge modes.
      GaussLegendre gl = gauss_legendre(q + 8);
      Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nm, nm);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nm);
      Eigen::VectorXd vals(nloc);
      Eigen::Matrix<double, Eigen::Dynamic, 3> dlam(nloc, 3);
      for (std::size_t j = 0; j < gl.points.size(); ++j)
      {
        const double t = 0.5 * (gl.points[j] + 1.0);
        Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
        lambda[(i + 1) % 3] = 1.0 - t;
        lambda[(i + 2) % 3] = t;
        const Point x = lambda[0] * mesh.vertex(v[0]) + lambda[1] * mesh.vertex(v[1]) +
                        lambda[2] * mesh.vertex(v[2]);
        const double d = g(x) - uh.value(k, lambda);
        ext.evaluate(lambda, vals, dlam);
        const Eigen::VectorXd m = vals.segment(off, nm);
        mass += gl.weights[j] * m * m.transpose();
        rhs += gl.weights[j] * d * m;
      }
      const Eigen::VectorXd c = mass.ldlt().solve(rhs);

      const QuadratureRule &rule = triangle_rule(2 * q);
      double sum = 0.0;
      for (int j = 0; j < rule.size(); ++j)
      {
        ext.evaluate(rule.points[j], vals, dlam);
        const Eigen::Vector3d dl_c = dlam.middleRows(off, nm).transpose() * c;
        const Eigen::Vector2d grad = dl.transpose() * dl_c;
        sum += rule.weights[j] * 2.0 * mesh.area(k) * grad.squaredNorm();
      }
      eta[k] = std::sqrt(eta[k] * eta[k] + sum);
    }
  }
  return eta;
}

}  // namespace hpfem
