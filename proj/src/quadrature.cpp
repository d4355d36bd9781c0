#include "hpfem/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hpfem
{

GaussLegendre gauss_legendre(int n)
{
  if (n < 1)
  {
    throw std::invalid_argument("gauss_legendre: need at least one point");
  }
  GaussLegendre rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k)
    {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
  {
    rule.points[n / 2] = 0.0;
  }
  return rule;
}

namespace
{

// Conical product rule: x = u, y = (1-u) v with u,v in [0,1].
QuadratureRule duffy_rule(int order)
{
  const int n = std::max(1, (order + 2) / 2 + 1);
  GaussLegendre gl = gauss_legendre(n);
  QuadratureRule rule;
  rule.order = order;
  for (int i = 0; i < n; ++i)
  {
    const double u = 0.5 * (gl.points[i] + 1.0);
    const double wu = 0.5 * gl.weights[i];
    for (int j = 0; j < n; ++j)
    {
      const double v = 0.5 * (gl.points[j] + 1.0);
      const double wv = 0.5 * gl.weights[j];
      const double x = u, y = (1.0 - u) * v;
      rule.points.emplace_back(1.0 - x - y, x, y);
      rule.weights.push_back(wu * wv * (1.0 - u));
    }
  }
  return rule;
}

}  // namespace

const QuadratureRule &triangle_rule(int order)
{
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  order = std::max(order, 1);
  std::lock_guard lock(mutex);
  auto &slot = cache[order];
  if (!slot)
  {
    slot = std::make_unique<QuadratureRule>(duffy_rule(order));
  }
  return *slot;
}

QuadratureRule composite_triangle_rule(int order, int levels)
{
  const QuadratureRule &base = triangle_rule(order);
  // Subtriangles as barycentric corner triples.
  using Tri = std::array<Eigen::Vector3d, 3>;
  std::vector<Tri> tris{{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
                         Eigen::Vector3d(0, 0, 1)}};
  for (int l = 0; l < levels; ++l)
  {
    std::vector<Tri> next;
    next.reserve(4 * tris.size());
    for (const auto &t : tris)
    {
      Eigen::Vector3d m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]),
                      m20 = 0.5 * (t[2] + t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({m01, t[1], m12});
      next.push_back({m20, m12, t[2]});
      next.push_back({m12, m20, m01});
    }
    tris = std::move(next);
  }
  const double scale = 1.0 / static_cast<double>(tris.size());
  QuadratureRule rule;
  rule.order = order;
  for (const auto &t : tris)
  {
    for (int q = 0; q < base.size(); ++q)
    {
      const auto &l = base.points[q];
      rule.points.push_back(l[0] * t[0] + l[1] * t[1] + l[2] * t[2]);
      rule.weights.push_back(base.weights[q] * scale);
    }
  }
  return rule;
}

QuadratureRule vertex_graded_rule(int order, int layers, double ratio)
{
  // x = s (1 - t), y = s t in reference coordinates; Jacobian s.
  const int n = std::max(1, (order + 2) / 2 + 1);
  GaussLegendre gl = gauss_legendre(n + 4);
  // The angular factor of r^alpha is analytic but has nearby complex poles.
  GaussLegendre gt = gauss_legendre(n + 8);
  std::vector<double> breaks{0.0};
  for (int l = layers; l >= 0; --l)
  {
    breaks.push_back(std::pow(ratio, l));
  }
  QuadratureRule rule;
  rule.order = order;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b)
  {
    const double s0 = breaks[b], s1 = breaks[b + 1];
    for (int i = 0; i < n + 4; ++i)
    {
      const double s = s0 + 0.5 * (gl.points[i] + 1.0) * (s1 - s0);
      const double ws = 0.5 * gl.weights[i] * (s1 - s0);
      for (int j = 0; j < n + 8; ++j)
      {
        const double t = 0.5 * (gt.points[j] + 1.0);
        const double wt = 0.5 * gt.weights[j];
        const double x = s * (1.0 - t), y = s * t;
        rule.points.emplace_back(1.0 - x - y, x, y);
        rule.weights.push_back(ws * wt * s);
      }
    }
  }
  return rule;
}

}  // namespace hpfem
