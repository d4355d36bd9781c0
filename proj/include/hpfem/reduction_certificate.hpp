#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hpfem/assembly.hpp"

namespace hpfem
{

/// Residual lifting in V_{l+1} restricted to the patch of a (coarse vertex),
/// with zero trace on the patch boundary.
struct PatchLiftingOnNext
{
  int vertex = -1;
  LocalLifting lifting;
  std::vector<int> fine_triangles;  // local triangle -> triangle of the next mesh
};

PatchLiftingOnNext hp_lifting(const FeFunction &u, const ScalarField &f, int a,
                              const std::shared_ptr<const HpSpace> &next_space,
                              int extra_order = default_extra_order);

/// Guaranteed lower bound on ||grad(u_{l+1} - u_l)|| over the marked patches:
/// sum_a ||grad r_a||^2 / ||grad sum_a r_a||, or 0 when the sum vanishes.
struct LowerBound
{
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
};

LowerBound lower_bound(std::span<const PatchLiftingOnNext> liftings, const Mesh &next_mesh);

struct ReductionFactor
{
  double c_red = 1.0;        // with the marking parameter theta
  double c_red_sharp = 1.0;  // with the achieved ratio eta(M)/eta(T)
};

/// C_red = sqrt(1 - theta^2 lb^2 / eta(M)^2), C_red^sharp = sqrt(1 - lb^2 / eta(T)^2).
/// A negative radicand yields NaN. Throws when eta(M) = 0.
ReductionFactor reduction_factor(double theta, double lower, double eta_marked, double eta_total);

/// ||grad(u_next - u)|| over the children of the given coarse triangles.
double increment_norm(const FeFunction &u, const FeFunction &u_next,
                      std::span<const int> coarse_triangles);

}  // namespace hpfem
