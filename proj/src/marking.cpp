#include "hpfem/marking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hpfem
{

std::vector<double> vertex_indicators(const Mesh &mesh, std::span<const double> eta)
{
  std::vector<double> va(mesh.num_vertices(), 0.0);
  for (int a = 0; a < mesh.num_vertices(); ++a)
  {
    double s = 0.0;
    for (int k : mesh.vertex_triangles(a))
    {
      s += eta[k] * eta[k];
    }
    va[a] = std::sqrt(s);
  }
  return va;
}

MarkedVertexSet mark_vertices(const Mesh &mesh, std::span<const double> eta, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0))
  {
    throw std::invalid_argument("mark_vertices: theta must lie in (0, 1]");
  }
  if (static_cast<int>(eta.size()) != mesh.num_triangles())
  {
    throw std::invalid_argument("mark_vertices: indicator count does not match mesh");
  }
  MarkedVertexSet out;
  double total_sq = 0.0;
  int positive = 0;
  for (double e : eta)
  {
    total_sq += e * e;
    positive += e > 0.0;
  }
  out.eta_total = std::sqrt(total_sq);
  if (total_sq == 0.0)
  {
    return out;
  }

  std::vector<double> va = vertex_indicators(mesh, eta);
  std::vector<int> order(mesh.num_vertices());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return va[a] > va[b]; });

  std::vector<char> covered(mesh.num_triangles(), 0);
  double marked_sq = 0.0;
  int covered_positive = 0;
  const double target_sq = theta * theta * total_sq;
  for (int a : order)
  {
    out.vertices.push_back(a);
    for (int k : mesh.vertex_triangles(a))
    {
      if (!covered[k])
      {
        covered[k] = 1;
        marked_sq += eta[k] * eta[k];
        covered_positive += eta[k] > 0.0;
      }
    }
    if (covered_positive == positive)
    {
      marked_sq = total_sq;  // same terms, possibly summed in another order
      break;
    }
    if (marked_sq >= target_sq)
    {
      break;
    }
  }
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    if (covered[k])
    {
      out.triangles.push_back(k);
    }
  }
  out.eta_marked = std::sqrt(marked_sq);
  out.theta_achieved = out.eta_marked / out.eta_total;
  return out;
}

}  // namespace hpfem
