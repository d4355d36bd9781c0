#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "hpfem/mesh.hpp"
#include "support/oracles.hpp"

using namespace hpfem;
using oracle::conforming;

namespace
{

double total_area(const Mesh &m)
{
  double s = 0.0;
  for (int k = 0; k < m.num_triangles(); ++k)
  {
    s += m.area(k);
  }
  return s;
}


}  // namespace

TEST(InitialMesh, TriangleCounts)
{
  EXPECT_EQ(build_initial_mesh(DomainShape::Square, 0.25).num_triangles(), 256);
  EXPECT_EQ(build_initial_mesh(DomainShape::LShape, 0.25).num_triangles(), 192);
  EXPECT_EQ(build_initial_mesh(DomainShape::Square, 2.0).num_triangles(), 4);
}

TEST(InitialMesh, AreaAndOrientation)
{
  Mesh sq = build_initial_mesh(DomainShape::Square, 0.5);
  EXPECT_NEAR(total_area(sq), 4.0, 1e-13);
  Mesh l = build_initial_mesh(DomainShape::LShape, 0.5);
  EXPECT_NEAR(total_area(l), 3.0, 1e-13);
  for (int k = 0; k < l.num_triangles(); ++k)
  {
    EXPECT_GT(l.area(k), 0.0);
  }
  EXPECT_TRUE(conforming(sq));
  EXPECT_TRUE(conforming(l));
  EXPECT_NEAR(sq.min_angle(), std::numbers::pi / 4, 1e-12);
}

TEST(InitialMesh, PatchSizes)
{
  Mesh m = build_initial_mesh(DomainShape::LShape, 0.5);
  std::multiset<int> sizes;
  for (int a = 0; a < m.num_vertices(); ++a)
  {
    const Point &x = m.vertex(a);
    const int n = static_cast<int>(vertex_patch(m, a).triangles.size());
    if (x.norm() < 1e-14)
    {
      EXPECT_EQ(n, 6);  // re-entrant corner
      EXPECT_TRUE(m.is_boundary_vertex(a));
    }
    else if (std::abs(x.x() + 1) < 1e-14 && std::abs(x.y() + 1) < 1e-14)
    {
      EXPECT_EQ(n, 2);
    }
    else if (std::abs(x.x() + 0.75) < 1e-14 && std::abs(x.y() - 0.75) < 1e-14)
    {
      EXPECT_EQ(n, 4);  // cell centre
    }
    else if (std::abs(x.x() + 0.5) < 1e-14 && std::abs(x.y() - 0.5) < 1e-14)
    {
      EXPECT_EQ(n, 8);
      EXPECT_FALSE(m.is_boundary_vertex(a));
    }
  }
}

TEST(Bisection, ConformityAndShapeRegularity)
{
  for (DomainShape shape : {DomainShape::Square, DomainShape::LShape})
  {
    Mesh m = build_initial_mesh(shape, 0.5);
    const double alpha0 = m.min_angle();
    const double area0 = total_area(m);
    std::mt19937 rng(42);
    for (int step = 0; step < 8; ++step)
    {
      std::vector<int> flagged;
      std::bernoulli_distribution pick(0.15);
      for (int k = 0; k < m.num_triangles(); ++k)
      {
        if (pick(rng) || m.vertex(m.cell(k).vertices[0]).norm() < 0.3)
        {
          flagged.push_back(k);
        }
      }
      Mesh next = bisect(m, flagged);
      ASSERT_EQ(next.generation(), m.generation() + 1);
      EXPECT_TRUE(conforming(next));
      EXPECT_NEAR(total_area(next), area0, 1e-12);
      EXPECT_GE(next.min_angle(), alpha0 / 2 - 1e-12);
      // Every flagged triangle is split and children cover their parent.
      std::vector<double> child_area(m.num_triangles(), 0.0);
      std::vector<int> nchildren(m.num_triangles(), 0);
      for (int k = 0; k < next.num_triangles(); ++k)
      {
        ASSERT_GE(next.parent(k), 0);
        child_area[next.parent(k)] += next.area(k);
        nchildren[next.parent(k)]++;
      }
      for (int k = 0; k < m.num_triangles(); ++k)
      {
        EXPECT_NEAR(child_area[k], m.area(k), 1e-14);
      }
      for (int k : flagged)
      {
        EXPECT_GE(nchildren[k], 2);
      }
      m = std::move(next);
    }
  }
}

TEST(Bisection, UniformRefinementFinitelyManyShapes)
{
  // NVB on a criss-cross mesh produces finitely many similarity classes:
  // min angle stays bounded after many uniform refinements.
  Mesh m = build_initial_mesh(DomainShape::Square, 1.0);
  for (int i = 0; i < 6; ++i)
  {
    std::vector<int> all(m.num_triangles());
    for (int k = 0; k < m.num_triangles(); ++k)
    {
      all[k] = k;
    }
    m = bisect(m, all);
  }
  EXPECT_EQ(m.num_triangles(), 16 * 64);
  EXPECT_NEAR(m.min_angle(), std::numbers::pi / 4, 1e-12);
}

TEST(Bisection, EmptyFlagsGivesIdentityChild)
{
  Mesh m = build_initial_mesh(DomainShape::Square, 1.0);
  Mesh next = bisect(m, {});
  ASSERT_EQ(next.num_triangles(), m.num_triangles());
  for (int k = 0; k < m.num_triangles(); ++k)
  {
    EXPECT_EQ(next.parent(k), k);
  }
}

TEST(LocalRefinement, MatchesGlobalRefinementOnPatch)
{
  Mesh m = build_initial_mesh(DomainShape::LShape, 0.5);
  for (int a = 0; a < m.num_vertices(); ++a)
  {
    SubMesh loc = refine_patch_local(m, a);
    VertexPatch patch = vertex_patch(m, a);
    double area = 0.0;
    for (int k : patch.triangles)
    {
      area += m.area(k);
    }
    double loc_area = 0.0;
    for (int k = 0; k < loc.mesh.num_triangles(); ++k)
    {
      loc_area += loc.mesh.area(k);
      EXPECT_TRUE(std::binary_search(patch.triangles.begin(), patch.triangles.end(),
                                     loc.host_triangle[k]));
    }
    EXPECT_NEAR(loc_area, area, 1e-13);
    EXPECT_GE(loc.mesh.num_triangles(), 2 * static_cast<int>(patch.triangles.size()));
  }
}

TEST(Barycentric, RoundTrip)
{
  Mesh m = build_initial_mesh(DomainShape::Square, 1.0);
  for (int k = 0; k < m.num_triangles(); ++k)
  {
    const auto &v = m.cell(k).vertices;
    Point x = 0.2 * m.vertex(v[0]) + 0.3 * m.vertex(v[1]) + 0.5 * m.vertex(v[2]);
    Eigen::Vector3d l = barycentric(m, k, x);
    EXPECT_NEAR(l[0], 0.2, 1e-14);
    EXPECT_NEAR(l[1], 0.3, 1e-14);
    EXPECT_NEAR(l[2], 0.5, 1e-14);
    Eigen::Matrix<double, 3, 2> g = barycentric_gradients(m, k);
    EXPECT_NEAR(g.colwise().sum().norm(), 0.0, 1e-13);
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        EXPECT_NEAR(g.row(i).dot(m.vertex(v[j]) - m.vertex(v[(i + 1) % 3])),
                    (i == j ? 1.0 : 0.0), 1e-13);
      }
    }
  }
}
