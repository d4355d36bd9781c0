#include <cmath>
#include <memory>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hpfem/assembly.hpp"
#include "hpfem/quadrature.hpp"

using namespace hpfem;

namespace
{

std::shared_ptr<const HpSpace> uniform_space(DomainShape s, double h, int p)
{
  auto mesh = std::make_shared<const Mesh>(build_initial_mesh(s, h));
  return std::make_shared<const HpSpace>(mesh, DegreeVector(mesh->num_triangles(), p));
}

double sum(const std::vector<double> &v)
{
  double s = 0.0;
  for (double x : v)
  {
    s += x;
  }
  return s;
}

}  // namespace

TEST(Assembly, StiffnessIsSymmetricPositive)
{
  auto V = uniform_space(DomainShape::LShape, 0.5, 3);
  LinearSystem sys = assemble_system(*V, [](const Point &) { return 1.0; }, nullptr);
  Eigen::MatrixXd a(sys.matrix);
  EXPECT_NEAR((a - a.transpose()).norm(), 0.0, 1e-12 * a.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Assembly, ExactForPolynomialSolutionInSpace)
{
  // u = (x^2-1)(y^2-1) has degree 4 and zero trace.
  auto u_grad = [](const Point &x) {
    return Eigen::Vector2d(2 * x.x() * (x.y() * x.y() - 1), 2 * x.y() * (x.x() * x.x() - 1));
  };
  auto f = [](const Point &x) { return 2.0 * (2.0 - x.x() * x.x() - x.y() * x.y()); };
  for (int p : {4, 5})
  {
    auto V = uniform_space(DomainShape::Square, 1.0, p);
    FeFunction uh = solve_primal(V, f);
    EXPECT_LT(std::sqrt(sum(energy_error_squared(uh, u_grad, {}))), 1e-11);
  }
  auto V = uniform_space(DomainShape::Square, 1.0, 3);
  FeFunction uh = solve_primal(V, f);
  EXPECT_GT(std::sqrt(sum(energy_error_squared(uh, u_grad, {}))), 1e-3);
}

TEST(Assembly, InhomogeneousDirichletPolynomial)
{
  auto u = [](const Point &x) { return 1.0 + x.x() * x.x() * x.y() - 3 * x.y() * x.y(); };
  auto u_grad = [](const Point &x) {
    return Eigen::Vector2d(2 * x.x() * x.y(), x.x() * x.x() - 6 * x.y());
  };
  auto f = [](const Point &x) { return -(2 * x.y() - 6.0); };
  auto V = uniform_space(DomainShape::LShape, 0.5, 3);
  FeFunction uh = solve_primal(V, f, u);
  EXPECT_LT(std::sqrt(sum(energy_error_squared(uh, u_grad, {}))), 1e-11);
  EXPECT_NEAR(uh(Point(-0.3, 0.4)), u(Point(-0.3, 0.4)), 1e-12);
}

TEST(Assembly, LinearElementsConvergeAtFirstOrder)
{
  auto u_grad = [](const Point &x) {
    return Eigen::Vector2d(M_PI * std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()),
                           M_PI * std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()));
  };
  auto f = [](const Point &x) {
    return 2 * M_PI * M_PI * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y());
  };
  double prev = 0.0;
  for (double h : {0.25, 0.125, 0.0625})
  {
    auto V = uniform_space(DomainShape::Square, h, 1);
    const double e = std::sqrt(sum(energy_error_squared(solve_primal(V, f), u_grad, {})));
    if (prev > 0)
    {
      EXPECT_NEAR(std::log2(prev / e), 1.0, 0.1);
    }
    prev = e;
  }
}

TEST(Assembly, GalerkinOrthogonality)
{
  auto f = [](const Point &x) { return std::exp(x.x()) * (1 + x.y()); };
  auto V = uniform_space(DomainShape::LShape, 0.5, 2);
  FeFunction uh = solve_primal(V, f);
  // Residual (f, phi) - (grad u, grad phi) vanishes for hat functions of free vertices.
  const Mesh &m = V->mesh();
  for (int a = 0; a < m.num_vertices(); ++a)
  {
    if (m.is_boundary_vertex(a))
    {
      continue;
    }
    FeFunction phi = hat_function(V, a);
    double res = 0.0;
    for (int k : m.vertex_triangles(a))
    {
      const QuadratureRule &r = triangle_rule(14);
      auto xs = physical_points(m, k, r.points);
      for (int q = 0; q < r.size(); ++q)
      {
        const double w = r.weights[q] * 2 * m.area(k);
        res += w * (f(xs[q]) * phi.value(k, r.points[q]) -
                    uh.gradient(k, r.points[q]).dot(phi.gradient(k, r.points[q])));
      }
    }
    EXPECT_NEAR(res, 0.0, 1e-9);
  }
}

TEST(Assembly, EnergyNormOfInterpolatedPolynomial)
{
  auto V = uniform_space(DomainShape::Square, 0.5, 2);
  FeFunction u(V, interpolate(*V, [](int, const Point &x) { return x.x() * x.y(); }));
  // int_{(-1,1)^2} x^2 + y^2 = 8/3.
  EXPECT_NEAR(energy_norm(u), std::sqrt(8.0 / 3.0), 1e-13);
}

TEST(PatchLifting, VanishesForExactSolution)
{
  auto f = [](const Point &x) { return 2.0 * (2.0 - x.x() * x.x() - x.y() * x.y()); };
  auto V = uniform_space(DomainShape::Square, 0.5, 4);
  FeFunction uh = solve_primal(V, f);
  const Mesh &m = V->mesh();
  for (int a : {0, 7, 20})
  {
    SubMesh loc = refine_patch_local(m, a);
    auto mesh = std::make_shared<const Mesh>(loc.mesh);
    auto W = std::make_shared<const HpSpace>(mesh, DegreeVector(mesh->num_triangles(), 5));
    LocalLifting r = solve_patch_dirichlet(W, loc.host_triangle, uh, f);
    EXPECT_LT(r.norm, 1e-10);
  }
}

TEST(PatchLifting, SatisfiesLocalProblem)
{
  auto f = [](const Point &x) { return std::cos(3 * x.x()) + x.y(); };
  auto V = uniform_space(DomainShape::LShape, 0.5, 2);
  FeFunction uh = solve_primal(V, f);
  const Mesh &m = V->mesh();
  for (int a = 0; a < m.num_vertices(); ++a)
  {
    SubMesh loc = refine_patch_local(m, a);
    auto mesh = std::make_shared<const Mesh>(loc.mesh);
    auto W = std::make_shared<const HpSpace>(mesh, DegreeVector(mesh->num_triangles(), 3));
    LocalLifting r = solve_patch_dirichlet(W, loc.host_triangle, uh, f);
    if (W->num_free() == 0)
    {
      EXPECT_TRUE(r.empty);
      continue;
    }
    EXPECT_NEAR(energy_norm(r.function), r.norm, 1e-12 + 1e-9 * r.norm);
    // Test against every local basis function with an independent quadrature.
    for (int d : W->free_dofs())
    {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(W->dimension());
      e[d] = 1.0;
      FeFunction v(W, e);
      double lhs = 0.0, rhs = 0.0;
      for (int k = 0; k < mesh->num_triangles(); ++k)
      {
        const QuadratureRule &q = composite_triangle_rule(12, 1);
        auto xs = physical_points(*mesh, k, q.points);
        const int K = loc.host_triangle[k];
        for (int i = 0; i < q.size(); ++i)
        {
          const double w = q.weights[i] * 2 * mesh->area(k);
          const Eigen::Vector2d gv = v.gradient(k, q.points[i]);
          lhs += w * r.function.gradient(k, q.points[i]).dot(gv);
          rhs += w * (f(xs[i]) * v.value(k, q.points[i]) -
                      uh.gradient(K, barycentric(m, K, xs[i])).dot(gv));
        }
      }
      EXPECT_NEAR(lhs, rhs, 1e-10);
    }
  }
}
