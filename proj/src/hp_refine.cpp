#include "hpfem/hp_refine.hpp"

#include <algorithm>
#include <stdexcept>

namespace hpfem
{

std::vector<int> degree_increments(const Mesh &mesh, const DegreeVector &degrees, int a)
{
  VertexPatch patch = vertex_patch(mesh, a);
  int pmin = degrees[patch.triangles.front()];
  for (int k : patch.triangles)
  {
    pmin = std::min(pmin, degrees[k]);
  }
  std::vector<int> delta;
  delta.reserve(patch.triangles.size());
  for (int k : patch.triangles)
  {
    delta.push_back(degrees[k] == pmin ? 1 : 0);
  }
  return delta;
}

LocalLifting h_lifting(const FeFunction &u, const ScalarField &f, int a, int extra_order)
{
  const HpSpace &space = u.space();
  SubMesh loc = refine_patch_local(space.mesh(), a);
  DegreeVector p(loc.mesh.num_triangles());
  for (int k = 0; k < loc.mesh.num_triangles(); ++k)
  {
    p[k] = space.degree(loc.host_triangle[k]);
  }
  auto mesh = std::make_shared<const Mesh>(std::move(loc.mesh));
  auto local = std::make_shared<const HpSpace>(mesh, std::move(p));
  return solve_patch_dirichlet(local, loc.host_triangle, u, f, extra_order);
}

LocalLifting p_lifting(const FeFunction &u, const ScalarField &f, int a, int extra_order)
{
  const HpSpace &space = u.space();
  const Mesh &mesh = space.mesh();
  VertexPatch patch = vertex_patch(mesh, a);
  std::vector<int> delta = degree_increments(mesh, space.degrees(), a);
  SubMesh loc = extract_submesh(mesh, patch.triangles);
  DegreeVector p(loc.mesh.num_triangles());
  for (int k = 0; k < loc.mesh.num_triangles(); ++k)
  {
    const int host = loc.host_triangle[k];
    const auto it = std::lower_bound(patch.triangles.begin(), patch.triangles.end(), host);
    p[k] = space.degree(host) + delta[it - patch.triangles.begin()];
  }
  auto sub = std::make_shared<const Mesh>(std::move(loc.mesh));
  auto local = std::make_shared<const HpSpace>(sub, std::move(p));
  return solve_patch_dirichlet(local, loc.host_triangle, u, f, extra_order);
}

HpDecision decide(const Mesh &mesh, const DegreeVector &degrees, std::span<const int> marked,
                  std::span<const double> h_norm, std::span<const double> p_norm)
{
  if (marked.size() != h_norm.size() || marked.size() != p_norm.size())
  {
    throw std::invalid_argument("decide: lifting norms do not match the marked vertices");
  }
  HpDecision d;
  d.marked.assign(marked.begin(), marked.end());
  d.h_norm.assign(h_norm.begin(), h_norm.end());
  d.p_norm.assign(p_norm.begin(), p_norm.end());
  d.target_degrees = degrees;
  std::vector<char> in_h(mesh.num_triangles(), 0), in_p(mesh.num_triangles(), 0);
  for (std::size_t i = 0; i < marked.size(); ++i)
  {
    const int a = marked[i];
    VertexPatch patch = vertex_patch(mesh, a);
    if (h_norm[i] >= p_norm[i])
    {
      d.vertices_h.push_back(a);
      for (int k : patch.triangles)
      {
        in_h[k] = 1;
      }
    }
    else
    {
      d.vertices_p.push_back(a);
      std::vector<int> delta = degree_increments(mesh, degrees, a);
      for (std::size_t t = 0; t < patch.triangles.size(); ++t)
      {
        const int k = patch.triangles[t];
        in_p[k] = 1;
        d.target_degrees[k] = std::max(d.target_degrees[k], degrees[k] + delta[t]);
      }
    }
  }
  std::sort(d.vertices_h.begin(), d.vertices_h.end());
  std::sort(d.vertices_p.begin(), d.vertices_p.end());
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    if (in_h[k])
    {
      d.triangles_h.push_back(k);
    }
    if (in_p[k])
    {
      d.triangles_p.push_back(k);
    }
  }
  return d;
}

HpDecision hp_decision(const FeFunction &u, const ScalarField &f, std::span<const int> marked,
                       int extra_order)
{
  std::vector<double> hn, pn;
  hn.reserve(marked.size());
  pn.reserve(marked.size());
  for (int a : marked)
  {
    hn.push_back(h_lifting(u, f, a, extra_order).norm);
    pn.push_back(p_lifting(u, f, a, extra_order).norm);
  }
  return decide(u.space().mesh(), u.space().degrees(), marked, hn, pn);
}

RefinementPlan next_level(const std::shared_ptr<const Mesh> &mesh, std::span<const int> h_flagged,
                          const DegreeVector &target_degrees, std::span<const int> h_vertices)
{
  if (static_cast<int>(target_degrees.size()) != mesh->num_triangles())
  {
    throw std::invalid_argument("next_level: degree vector does not match mesh");
  }
  RefinementPlan plan;
  plan.mesh = std::make_shared<const Mesh>(bisect(*mesh, h_flagged));
  const Mesh &fine = *plan.mesh;
  plan.degrees.resize(fine.num_triangles());
  std::vector<int> nchildren(mesh->num_triangles(), 0);
  for (int k = 0; k < fine.num_triangles(); ++k)
  {
    plan.degrees[k] = target_degrees[fine.parent(k)];
    nchildren[fine.parent(k)]++;
  }
  for (int a : h_vertices)
  {
    SubMesh loc = refine_patch_local(*mesh, a);
    std::vector<int> local_children(mesh->num_triangles(), 0);
    for (int host : loc.host_triangle)
    {
      local_children[host]++;
    }
    for (int k : mesh->vertex_triangles(a))
    {
      if (nchildren[k] != local_children[k])
      {
        plan.consistency_violations++;
        break;
      }
    }
  }
  return plan;
}

}  // namespace hpfem
