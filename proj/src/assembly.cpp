#include "hpfem/assembly.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "hpfem/quadrature.hpp"

namespace hpfem
{

std::vector<Point> physical_points(const Mesh &mesh, int k, std::span<const Eigen::Vector3d> pts)
{
  const auto &v = mesh.cell(k).vertices;
  const Point &p0 = mesh.vertex(v[0]);
  const Point &p1 = mesh.vertex(v[1]);
  const Point &p2 = mesh.vertex(v[2]);
  std::vector<Point> xs;
  xs.reserve(pts.size());
  for (const auto &l : pts)
  {
    xs.push_back(l[0] * p0 + l[1] * p1 + l[2] * p2);
  }
  return xs;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> gradients_in_host(const FeFunction &u, int host_k,
                                                            std::span<const Point> xs)
{
  const Mesh &mesh = u.space().mesh();
  std::vector<Eigen::Vector3d> lambdas;
  lambdas.reserve(xs.size());
  for (const auto &x : xs)
  {
    lambdas.push_back(barycentric(mesh, host_k, x));
  }
  ElementTabulation tab = tabulate(u.space(), host_k, lambdas);
  Eigen::VectorXd c = u.local_coefficients(host_k);
  Eigen::Matrix<double, Eigen::Dynamic, 2> g(xs.size(), 2);
  g.col(0) = tab.dx.transpose() * c;
  g.col(1) = tab.dy.transpose() * c;
  return g;
}

LinearSystem assemble_system(const HpSpace &space, const ScalarField &f, const ScalarField &g,
                             int extra_order)
{
  const Mesh &mesh = space.mesh();
  LinearSystem sys;
  sys.dirichlet = Eigen::VectorXd::Zero(space.dimension());
  if (g)
  {
    sys.dirichlet =
        interpolate(space, [&](int, const Point &x) { return g(x); }, true, 2 * extra_order + 8);
  }
  const int n = space.num_free();
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;

  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const QuadratureRule &rule = triangle_rule(2 * space.degree(k) + extra_order);
    ElementTabulation tab = tabulate(space, k, rule.points);
    const double jac = 2.0 * mesh.area(k);
    Eigen::VectorXd w(rule.size());
    Eigen::VectorXd fq(rule.size());
    auto xs = physical_points(mesh, k, rule.points);
    for (int q = 0; q < rule.size(); ++q)
    {
      w[q] = rule.weights[q] * jac;
      fq[q] = f ? f(xs[q]) : 0.0;
    }
    Eigen::MatrixXd a = tab.dx * w.asDiagonal() * tab.dx.transpose() +
                        tab.dy * w.asDiagonal() * tab.dy.transpose();
    Eigen::VectorXd b = tab.values * (w.cwiseProduct(fq));
    auto dofs = space.local_dofs(k);
    const int nl = static_cast<int>(dofs.size());
    for (int i = 0; i < nl; ++i)
    {
      const int fi = space.free_index(dofs[i]);
      if (fi < 0)
      {
        continue;
      }
      sys.rhs[fi] += b[i];
      for (int j = 0; j < nl; ++j)
      {
        const int fj = space.free_index(dofs[j]);
        if (fj >= 0)
        {
          triplets.emplace_back(fi, fj, a(i, j));
        }
        else
        {
          sys.rhs[fi] -= a(i, j) * sys.dirichlet[dofs[j]];
        }
      }
    }
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

FeFunction solve_primal(std::shared_ptr<const HpSpace> space, const ScalarField &f,
                        const ScalarField &g, int extra_order)
{
  LinearSystem sys = assemble_system(*space, f, g, extra_order);
  Eigen::VectorXd coeffs = sys.dirichlet;
  if (space->num_free() > 0)
  {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sys.matrix);
    if (solver.info() != Eigen::Success)
    {
      throw std::runtime_error("solve_primal: stiffness factorization failed (" +
                               std::to_string(space->num_free()) + " free DOFs)");
    }
    Eigen::VectorXd x = solver.solve(sys.rhs);
    for (int i = 0; i < space->num_free(); ++i)
    {
      coeffs[space->free_dofs()[i]] = x[i];
    }
  }
  return FeFunction(std::move(space), std::move(coeffs));
}

LocalLifting solve_patch_dirichlet(std::shared_ptr<const HpSpace> local_space,
                                   std::span<const int> host_triangle, const FeFunction &u,
                                   const ScalarField &f, int extra_order)
{
  const HpSpace &space = *local_space;
  const Mesh &mesh = space.mesh();
  if (static_cast<int>(host_triangle.size()) != mesh.num_triangles())
  {
    throw std::invalid_argument("solve_patch_dirichlet: host map size mismatch");
  }
  const int n = space.num_free();
  if (n == 0)
  {
    return {FeFunction(local_space), 0.0, true};
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const QuadratureRule &rule = triangle_rule(2 * space.degree(k) + extra_order);
    ElementTabulation tab = tabulate(space, k, rule.points);
    auto xs = physical_points(mesh, k, rule.points);
    auto gu = gradients_in_host(u, host_triangle[k], xs);
    const double jac = 2.0 * mesh.area(k);
    Eigen::VectorXd w(rule.size()), fq(rule.size());
    for (int q = 0; q < rule.size(); ++q)
    {
      w[q] = rule.weights[q] * jac;
      fq[q] = f ? f(xs[q]) : 0.0;
    }
    Eigen::MatrixXd ak = tab.dx * w.asDiagonal() * tab.dx.transpose() +
                         tab.dy * w.asDiagonal() * tab.dy.transpose();
    Eigen::VectorXd bk = tab.values * w.cwiseProduct(fq) -
                         tab.dx * w.cwiseProduct(gu.col(0)) - tab.dy * w.cwiseProduct(gu.col(1));
    auto dofs = space.local_dofs(k);
    for (std::size_t i = 0; i < dofs.size(); ++i)
    {
      const int fi = space.free_index(dofs[i]);
      if (fi < 0)
      {
        continue;
      }
      b[fi] += bk[i];
      for (std::size_t j = 0; j < dofs.size(); ++j)
      {
        const int fj = space.free_index(dofs[j]);
        if (fj >= 0)
        {
          a(fi, fj) += ak(i, j);
        }
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
  {
    throw std::runtime_error("solve_patch_dirichlet: local stiffness matrix is not SPD");
  }
  Eigen::VectorXd x = llt.solve(b);
  FeFunction r(local_space);
  for (int i = 0; i < n; ++i)
  {
    r.coefficients()[space.free_dofs()[i]] = x[i];
  }
  // ||grad r||^2 = r^T A r on the free block.
  const double norm = std::sqrt(std::max(0.0, x.dot(a * x)));
  return {std::move(r), norm, false};
}

double energy_norm(const FeFunction &v, std::span<const int> region, int extra_order)
{
  const HpSpace &space = v.space();
  const Mesh &mesh = space.mesh();
  std::vector<int> all;
  if (region.empty())
  {
    all.resize(mesh.num_triangles());
    std::iota(all.begin(), all.end(), 0);
    region = all;
  }
  double sum = 0.0;
  for (int k : region)
  {
    const QuadratureRule &rule = triangle_rule(2 * space.degree(k) + extra_order);
    ElementTabulation tab = tabulate(space, k, rule.points);
    Eigen::VectorXd c = v.local_coefficients(k);
    Eigen::VectorXd gx = tab.dx.transpose() * c;
    Eigen::VectorXd gy = tab.dy.transpose() * c;
    const double jac = 2.0 * mesh.area(k);
    for (int q = 0; q < rule.size(); ++q)
    {
      sum += rule.weights[q] * jac * (gx[q] * gx[q] + gy[q] * gy[q]);
    }
  }
  return std::sqrt(sum);
}

TriangleRule error_rule(const Mesh &mesh, int k, int order, const ErrorQuadrature &quad)
{
  TriangleRule out;
  const auto &v = mesh.cell(k).vertices;
  if (quad.singular_point)
  {
    for (int i = 0; i < 3; ++i)
    {
      if ((mesh.vertex(v[i]) - *quad.singular_point).norm() < 1e-14)
      {
        QuadratureRule r = vertex_graded_rule(order, 30);
        for (int q = 0; q < r.size(); ++q)
        {
          Eigen::Vector3d l;
          l[i] = r.points[q][0];
          l[(i + 1) % 3] = r.points[q][1];
          l[(i + 2) % 3] = r.points[q][2];
          out.points.push_back(l);
          out.weights.push_back(r.weights[q]);
        }
        return out;
      }
    }
  }
  int levels = 0;
  if (quad.resolution > 0.0)
  {
    double h = mesh.diameter(k);
    while (h > quad.resolution && levels < 5)
    {
      h *= 0.5;
      ++levels;
    }
  }
  QuadratureRule r = levels > 0 ? composite_triangle_rule(order, levels) : triangle_rule(order);
  out.points = std::move(r.points);
  out.weights = std::move(r.weights);
  return out;
}

std::vector<double> energy_error_squared(const FeFunction &uh, const VectorField &grad_exact,
                                         const ErrorQuadrature &quad)
{
  const HpSpace &space = uh.space();
  const Mesh &mesh = space.mesh();
  std::vector<double> err(mesh.num_triangles(), 0.0);
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    TriangleRule rule = error_rule(mesh, k, 2 * space.degree(k) + quad.extra_order, quad);
    ElementTabulation tab = tabulate(space, k, rule.points);
    Eigen::VectorXd c = uh.local_coefficients(k);
    Eigen::VectorXd gx = tab.dx.transpose() * c;
    Eigen::VectorXd gy = tab.dy.transpose() * c;
    auto xs = physical_points(mesh, k, rule.points);
    const double jac = 2.0 * mesh.area(k);
    double sum = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q)
    {
      Eigen::Vector2d d = grad_exact(xs[q]) - Eigen::Vector2d(gx[q], gy[q]);
      sum += rule.weights[q] * jac * d.squaredNorm();
    }
    err[k] = sum;
  }
  return err;
}

}  // namespace hpfem
