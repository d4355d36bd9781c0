#pragma once

#include <span>
#include <vector>

#include "hpfem/mesh.hpp"

namespace hpfem
{

struct MarkedVertexSet
{
  std::vector<int> vertices;   // in selection order
  std::vector<int> triangles;  // union of the marked patches, sorted
  double eta_marked = 0.0;     // eta(M)
  double eta_total = 0.0;      // eta(T)
  double theta_achieved = 0.0; // eta(M) / eta(T)
};

/// Patch indicator eta(T^a) = (sum over K in T^a of eta_K^2)^{1/2} for every vertex.
std::vector<double> vertex_indicators(const Mesh &mesh, std::span<const double> eta);

/// Greedy vertex bulk chasing: vertices in order of decreasing eta(T^a), ties by
/// increasing id, are added until eta(M) >= theta eta(T), M being the union of
/// the marked patches. Marks nothing when eta vanishes identically.
MarkedVertexSet mark_vertices(const Mesh &mesh, std::span<const double> eta, double theta);

}  // namespace hpfem
