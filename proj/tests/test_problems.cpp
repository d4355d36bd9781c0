#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hpfem/mesh_io.hpp"
#include "hpfem/problems.hpp"
#include "hpfem/quadrature.hpp"

using namespace hpfem;

namespace
{

// Five-point Laplacian with one Richardson step (fourth order in h).
double fd_laplacian(const ScalarField &u, const Point &x, double h)
{
  auto d = [&](double s) {
    const Point ex(s, 0.0), ey(0.0, s);
    return (u(x + ex) + u(x - ex) + u(x + ey) + u(x - ey) - 4.0 * u(x)) / (s * s);
  };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

Point random_point(std::mt19937 &rng, DomainShape d)
{
  std::uniform_real_distribution<double> c(-0.95, 0.95);
  for (;;)
  {
    Point x(c(rng), c(rng));
    // L-shape points stay 0.1 away from the cut-out quadrant.
    if (d == DomainShape::Square || !(x.x() > -0.1 && x.y() < 0.1))
    {
      return x;
    }
  }
}

}  // namespace

TEST(Problems, GaussianSourceMatchesFiniteDifferences)
{
  const Problem p = gaussian_problem();
  std::mt19937 rng(1);
  for (int i = 0; i < 100; ++i)
  {
    const Point x = random_point(rng, DomainShape::Square);
    const double fd = -fd_laplacian(p.u, x, 2e-3);
    const double f = p.f(x);
    EXPECT_NEAR(f, fd, 1e-6 * std::max(1.0, std::abs(f))) << x.transpose();
  }
}

TEST(Problems, GradientsMatchFiniteDifferences)
{
  std::mt19937 rng(2);
  for (const Problem &p : {gaussian_problem(), lshape_problem()})
  {
    for (int i = 0; i < 100; ++i)
    {
      const Point x = random_point(rng, p.domain);
      const double h = 1e-6;
      const Eigen::Vector2d fd((p.u(x + Point(h, 0)) - p.u(x - Point(h, 0))) / (2 * h),
                               (p.u(x + Point(0, h)) - p.u(x - Point(0, h))) / (2 * h));
      EXPECT_NEAR((p.grad_u(x) - fd).norm(), 0.0, 1e-7 * std::max(1.0, fd.norm())) << p.name;
    }
  }
}

TEST(Problems, LShapeSolutionIsHarmonicAndMatchesBoundaryData)
{
  const Problem p = lshape_problem();
  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i)
  {
    const Point x = random_point(rng, DomainShape::LShape);
    EXPECT_NEAR(fd_laplacian(p.u, x, 1e-2), 0.0, 1e-6);
    EXPECT_DOUBLE_EQ(p.g(x), p.u(x));
  }
  // Vanishes on the two edges meeting at the reentrant corner.
  EXPECT_NEAR(p.u(Point(0.5, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(p.u(Point(0.0, -0.5)), 0.0, 1e-15);
}

TEST(Problems, GaussianReferenceEnergy)
{
  // Tensor Gauss-Legendre over 16x16 subsquares.
  const Problem p = gaussian_problem();
  const GaussLegendre gl = gauss_legendre(30);
  const int n = 16;
  const double w = 2.0 / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      for (std::size_t a = 0; a < gl.points.size(); ++a)
      {
        for (std::size_t b = 0; b < gl.points.size(); ++b)
        {
          const Point x(-1.0 + w * (i + 0.5 * (gl.points[a] + 1.0)),
                        -1.0 + w * (j + 0.5 * (gl.points[b] + 1.0)));
          s += gl.weights[a] * gl.weights[b] * 0.25 * w * w * p.grad_u(x).squaredNorm();
        }
      }
    }
  }
  EXPECT_NEAR(std::sqrt(s), p.energy, 1e-12);
}

TEST(Problems, LShapeReferenceEnergy)
{
  // |grad u|^2 = (4/9) r^{-2/3}; in polar coordinates about the corner each of
  // the three unit squares contributes (2/3) int_0^{pi/4} sec^{4/3}.
  const GaussLegendre gl = gauss_legendre(40);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.points.size(); ++i)
  {
    const double phi = std::numbers::pi / 8.0 * (gl.points[i] + 1.0);
    s += gl.weights[i] * std::numbers::pi / 8.0 * std::pow(std::cos(phi), -4.0 / 3.0);
  }
  EXPECT_NEAR(std::sqrt(2.0 * s), lshape_problem().energy, 1e-13);
}

TEST(Problems, DirichletIndicatorVanishesForExactTrace)
{
  // Boundary data linear: the degree-1 interpolant reproduces it on every edge.
  auto mesh = std::make_shared<const Mesh>(build_initial_mesh(DomainShape::LShape, 0.5));
  auto space = std::make_shared<const HpSpace>(mesh, DegreeVector(mesh->num_triangles(), 1));
  auto g = [](const Point &x) { return 1.0 + 2.0 * x.x() - x.y(); };
  const FeFunction u = solve_primal(space, [](const Point &) { return 0.0; }, g);
  for (double e : dirichlet_indicators(u, g))
  {
    EXPECT_LT(e, 1e-12);
  }
  const Problem p = lshape_problem();
  const FeFunction v = solve_primal(space, p.f, p.g);
  const auto eta = dirichlet_indicators(v, p.g);
  double total = 0.0;
  for (int k = 0; k < mesh->num_triangles(); ++k)
  {
    bool boundary = false;
    for (int e : mesh->triangle_edges(k))
    {
      boundary = boundary || mesh->edge(e).on_boundary();
    }
    if (!boundary)
    {
      EXPECT_EQ(eta[k], 0.0);
    }
    total += eta[k];
  }
  EXPECT_GT(total, 0.0);
}

TEST(MeshIo, RoundTrip)
{
  const Mesh mesh = bisect(build_initial_mesh(DomainShape::LShape, 0.5), std::vector<int>{0, 5, 9});
  DegreeVector p(mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    p[k] = 1 + k % 4;
  }
  std::stringstream ss;
  write_mesh(ss, mesh, p);
  const MeshWithDegrees back = read_mesh(ss);
  ASSERT_EQ(back.mesh.num_vertices(), mesh.num_vertices());
  ASSERT_EQ(back.mesh.num_triangles(), mesh.num_triangles());
  EXPECT_EQ(back.degrees, p);
  for (int a = 0; a < mesh.num_vertices(); ++a)
  {
    EXPECT_EQ(back.mesh.vertex(a), mesh.vertex(a));
  }
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    EXPECT_EQ(back.mesh.cell(k).vertices, mesh.cell(k).vertices);
  }
}

TEST(MeshIo, RejectsMalformedInput)
{
  std::stringstream bad("# vertices 2\n0 0 0\n");
  EXPECT_THROW(read_mesh(bad), std::runtime_error);
}
