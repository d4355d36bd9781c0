#include "hpfem/reduction_certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hpfem/quadrature.hpp"

namespace hpfem
{

PatchLiftingOnNext hp_lifting(const FeFunction &u, const ScalarField &f, int a,
                              const std::shared_ptr<const HpSpace> &next_space, int extra_order)
{
  const Mesh &coarse = u.space().mesh();
  const Mesh &fine = next_space->mesh();
  if (!fine.has_parents() || fine.generation() != coarse.generation() + 1)
  {
    throw std::invalid_argument("hp_lifting: next mesh is not a refinement of the current mesh");
  }
  VertexPatch patch = vertex_patch(coarse, a);
  std::vector<int> children;
  for (int k = 0; k < fine.num_triangles(); ++k)
  {
    if (std::binary_search(patch.triangles.begin(), patch.triangles.end(), fine.parent(k)))
    {
      children.push_back(k);
    }
  }
  SubMesh loc = extract_submesh(fine, children);
  DegreeVector p(loc.mesh.num_triangles());
  std::vector<int> hosts(loc.mesh.num_triangles());
  for (int k = 0; k < loc.mesh.num_triangles(); ++k)
  {
    p[k] = next_space->degree(loc.host_triangle[k]);
    hosts[k] = fine.parent(loc.host_triangle[k]);
  }
  auto mesh = std::make_shared<const Mesh>(std::move(loc.mesh));
  auto local = std::make_shared<const HpSpace>(mesh, std::move(p));
  return {a, solve_patch_dirichlet(local, hosts, u, f, extra_order), std::move(loc.host_triangle)};
}

LowerBound lower_bound(std::span<const PatchLiftingOnNext> liftings, const Mesh &next_mesh)
{
  LowerBound lb;
  // Contributions (lifting index, local triangle) per fine triangle.
  std::vector<std::vector<std::pair<int, int>>> parts(next_mesh.num_triangles());
  for (std::size_t i = 0; i < liftings.size(); ++i)
  {
    const auto &l = liftings[i];
    lb.numerator += l.lifting.norm * l.lifting.norm;
    for (std::size_t t = 0; t < l.fine_triangles.size(); ++t)
    {
      parts[l.fine_triangles[t]].emplace_back(static_cast<int>(i), static_cast<int>(t));
    }
  }
  double denom_sq = 0.0;
  for (int k = 0; k < next_mesh.num_triangles(); ++k)
  {
    if (parts[k].empty())
    {
      continue;
    }
    int pmax = 1;
    for (auto [i, t] : parts[k])
    {
      pmax = std::max(pmax, liftings[i].lifting.function.space().degree(t));
    }
    const QuadratureRule &rule = triangle_rule(2 * pmax);
    Eigen::VectorXd gx = Eigen::VectorXd::Zero(rule.size());
    Eigen::VectorXd gy = Eigen::VectorXd::Zero(rule.size());
    for (auto [i, t] : parts[k])
    {
      const FeFunction &r = liftings[i].lifting.function;
      const Mesh &lm = r.space().mesh();
      // Local triangles keep the vertex order of the fine triangle; map through
      // physical coordinates anyway so that no such assumption is needed.
      std::vector<Eigen::Vector3d> lambdas;
      lambdas.reserve(rule.size());
      for (const auto &pt : rule.points)
      {
        const auto &v = next_mesh.cell(k).vertices;
        const Point x = pt[0] * next_mesh.vertex(v[0]) + pt[1] * next_mesh.vertex(v[1]) +
                        pt[2] * next_mesh.vertex(v[2]);
        lambdas.push_back(barycentric(lm, t, x));
      }
      ElementTabulation tab = tabulate(r.space(), t, lambdas);
      Eigen::VectorXd c = r.local_coefficients(t);
      gx += tab.dx.transpose() * c;
      gy += tab.dy.transpose() * c;
    }
    const double jac = 2.0 * next_mesh.area(k);
    for (int q = 0; q < rule.size(); ++q)
    {
      denom_sq += rule.weights[q] * jac * (gx[q] * gx[q] + gy[q] * gy[q]);
    }
  }
  lb.denominator = std::sqrt(denom_sq);
  lb.value = lb.denominator > 0.0 ? lb.numerator / lb.denominator : 0.0;
  return lb;
}

ReductionFactor reduction_factor(double theta, double lower, double eta_marked, double eta_total)
{
  if (!(eta_marked > 0.0) || !(eta_total > 0.0))
  {
    throw std::domain_error("reduction_factor: vanishing estimator, the loop has converged");
  }
  auto root = [](double x) {
    return x >= 0.0 ? std::sqrt(x) : std::numeric_limits<double>::quiet_NaN();
  };
  ReductionFactor r;
  r.c_red = root(1.0 - theta * theta * lower * lower / (eta_marked * eta_marked));
  r.c_red_sharp = root(1.0 - lower * lower / (eta_total * eta_total));
  return r;
}

double increment_norm(const FeFunction &u, const FeFunction &u_next,
                      std::span<const int> coarse_triangles)
{
  FeFunction diff = embed(u, u_next.space_ptr());
  diff.coefficients() = u_next.coefficients() - diff.coefficients();
  const Mesh &fine = u_next.space().mesh();
  const bool same = &fine == &u.space().mesh();
  std::vector<int> region;
  for (int k = 0; k < fine.num_triangles(); ++k)
  {
    const int parent = same ? k : fine.parent(k);
    if (std::binary_search(coarse_triangles.begin(), coarse_triangles.end(), parent))
    {
      region.push_back(k);
    }
  }
  if (region.empty())
  {
    return 0.0;
  }
  return energy_norm(diff, region);
}

}  // namespace hpfem
