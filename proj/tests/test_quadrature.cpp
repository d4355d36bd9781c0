#include <cmath>

#include <gtest/gtest.h>

#include "hpfem/quadrature.hpp"

using namespace hpfem;

namespace
{

// Integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double monomial_integral(int a, int b)
{
  return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
}

double apply(const QuadratureRule &r, int a, int b)
{
  double s = 0.0;
  for (int q = 0; q < r.size(); ++q)
  {
    s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
  }
  return s;
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomials)
{
  for (int n = 1; n <= 20; ++n)
  {
    GaussLegendre gl = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d)
    {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
      {
        s += gl.weights[i] * std::pow(gl.points[i], d);
      }
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " d=" << d;
    }
  }
}

TEST(TriangleRule, ExactForDegree)
{
  for (int order = 0; order <= 30; ++order)
  {
    const QuadratureRule &r = triangle_rule(order);
    EXPECT_GE(r.order, order);
    for (int a = 0; a <= order; ++a)
    {
      for (int b = 0; a + b <= order; ++b)
      {
        const double exact = monomial_integral(a, b);
        EXPECT_NEAR(apply(r, a, b), exact, 1e-14 + 1e-12 * exact);
      }
    }
    for (const auto &p : r.points)
    {
      EXPECT_NEAR(p.sum(), 1.0, 1e-14);
      EXPECT_GT(p.minCoeff(), 0.0);
    }
  }
}

TEST(TriangleRule, CompositeExact)
{
  QuadratureRule r = composite_triangle_rule(6, 3);
  EXPECT_EQ(r.size(), 64 * triangle_rule(6).size());
  for (int a = 0; a <= 6; ++a)
  {
    for (int b = 0; a + b <= 6; ++b)
    {
      EXPECT_NEAR(apply(r, a, b), monomial_integral(a, b), 1e-14);
    }
  }
}

TEST(TriangleRule, GradedRuleHandlesCornerSingularity)
{
  QuadratureRule r = vertex_graded_rule(12, 30);
  for (int a = 0; a <= 8; ++a)
  {
    for (int b = 0; a + b <= 8; ++b)
    {
      EXPECT_NEAR(apply(r, a, b), monomial_integral(a, b), 1e-13);
    }
  }
  // int_T r^{-2/3} with r = sqrt(x^2+y^2); polar: int_0^{pi/2} (cos+sin)^{-4/3} / (4/3) dphi.
  double s = 0.0;
  for (int q = 0; q < r.size(); ++q)
  {
    const double rad = std::hypot(r.points[q][1], r.points[q][2]);
    s += r.weights[q] * std::pow(rad, -2.0 / 3.0);
  }
  GaussLegendre gl = gauss_legendre(40);
  double exact = 0.0;
  for (int i = 0; i < 40; ++i)
  {
    const double phi = 0.25 * M_PI * (gl.points[i] + 1.0);
    exact += 0.25 * M_PI * gl.weights[i] * std::pow(std::cos(phi) + std::sin(phi), -4.0 / 3.0) * 0.75;
  }
  EXPECT_NEAR(s, exact, 1e-12);
}
