#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hpfem/assembly.hpp"

namespace hpfem
{

/// delta_K^a for the triangles of the patch of a (order of vertex_patch):
/// 1 where p_K equals the patch minimum, else 0.
std::vector<int> degree_increments(const Mesh &mesh, const DegreeVector &degrees, int a);

/// Residual lifting on the locally bisected patch, children keeping their parent degree.
LocalLifting h_lifting(const FeFunction &u, const ScalarField &f, int a,
                       int extra_order = default_extra_order);

/// Residual lifting on the unrefined patch with degrees p_K + delta_K^a.
LocalLifting p_lifting(const FeFunction &u, const ScalarField &f, int a,
                       int extra_order = default_extra_order);

struct HpDecision
{
  std::vector<int> marked;
  std::vector<double> h_norm, p_norm;  // aligned with `marked`
  std::vector<int> vertices_h, vertices_p;
  std::vector<int> triangles_h, triangles_p;
  /// Degree given to the children of every current triangle.
  DegreeVector target_degrees;
};

/// V_h = {a : ||grad r^{a,h}|| >= ||grad r^{a,p}||}, V_p the rest of the marked
/// vertices; M_h, M_p the triangles with a vertex in V_h, V_p. Triangles of M_p
/// receive max over a in V_K and V_p of p_K + delta_K^a.
HpDecision decide(const Mesh &mesh, const DegreeVector &degrees, std::span<const int> marked,
                  std::span<const double> h_norm, std::span<const double> p_norm);

/// Liftings for all marked vertices followed by `decide`.
HpDecision hp_decision(const FeFunction &u, const ScalarField &f, std::span<const int> marked,
                       int extra_order = default_extra_order);

struct RefinementPlan
{
  std::shared_ptr<const Mesh> mesh;
  DegreeVector degrees;
  /// h-refined vertices whose patch was bisected further than the local patch refinement.
  int consistency_violations = 0;
};

/// Bisects `h_flagged` (with closure) and gives every child the target degree of its parent.
RefinementPlan next_level(const std::shared_ptr<const Mesh> &mesh, std::span<const int> h_flagged,
                          const DegreeVector &target_degrees,
                          std::span<const int> h_vertices = {});

}  // namespace hpfem
