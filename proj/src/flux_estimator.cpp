#include "hpfem/flux_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

#include "hpfem/quadrature.hpp"

namespace hpfem
{

FluxField::FluxField(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)), parts_(mesh_->num_triangles())
{
}

void FluxField::add(int k, int degree, Eigen::VectorXd raw)
{
  for (auto &c : parts_[k])
  {
    if (c.degree == degree)
    {
      c.raw += raw;
      return;
    }
  }
  parts_[k].push_back({degree, std::move(raw)});
}

int FluxField::degree(int k) const
{
  int d = -1;
  for (const auto &c : parts_[k])
  {
    d = std::max(d, c.degree);
  }
  return d;
}

Eigen::Vector2d FluxField::value(int k, const Point &x) const
{
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  for (const auto &c : parts_[k])
  {
    RtnRawBasis basis(*mesh_, k, c.degree);
    Eigen::Matrix<double, Eigen::Dynamic, 2> v(basis.size(), 2);
    Eigen::VectorXd d(basis.size());
    basis.evaluate(x, v, d);
    s += v.transpose() * c.raw;
  }
  return s;
}

double FluxField::divergence(int k, const Point &x) const
{
  double s = 0.0;
  for (const auto &c : parts_[k])
  {
    RtnRawBasis basis(*mesh_, k, c.degree);
    Eigen::Matrix<double, Eigen::Dynamic, 2> v(basis.size(), 2);
    Eigen::VectorXd d(basis.size());
    basis.evaluate(x, v, d);
    s += d.dot(c.raw);
  }
  return s;
}

PatchFlux patch_flux(const FeFunction &u, const ScalarField &f, int a, int extra_order)
{
  const HpSpace &space = u.space();
  const Mesh &mesh = space.mesh();
  VertexPatch patch = vertex_patch(mesh, a);
  const auto &tris = patch.triangles;
  const int nt = static_cast<int>(tris.size());
  int p = 1;
  for (int k : tris)
  {
    p = std::max(p, space.degree(k));
  }
  const int ne = RtnElement::edge_dofs(p);
  const int ni = RtnElement::interior_dofs(p);
  const int nq = (p + 1) * (p + 2) / 2;

  // Global flux numbering on the patch: shared edges first come first served.
  std::vector<std::vector<int>> dof_map(nt);
  int nflux = 0;
  std::vector<int> edge_start(mesh.num_edges(), -2);
  for (int t = 0; t < nt; ++t)
  {
    const int k = tris[t];
    auto &map = dof_map[t];
    map.assign(3 * ne + ni, -1);
    for (int i = 0; i < 3; ++i)
    {
      const int e = mesh.triangle_edges(k)[i];
      const Edge &ed = mesh.edge(e);
      const int other = ed.t0 == k ? ed.t1 : ed.t0;
      const bool shared =
          other >= 0 && std::binary_search(tris.begin(), tris.end(), other);
      const bool free = shared || (ed.on_boundary() && patch.boundary);
      if (!free)
      {
        continue;
      }
      if (edge_start[e] == -2)
      {
        edge_start[e] = nflux;
        nflux += ne;
      }
      for (int j = 0; j < ne; ++j)
      {
        map[i * ne + j] = edge_start[e] + j;
      }
    }
    for (int j = 0; j < ni; ++j)
    {
      map[3 * ne + j] = nflux++;
    }
  }
  const int npress = nt * nq;
  const int nmult = patch.boundary ? 0 : 1;
  const int n = nflux + npress + nmult;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  std::vector<RtnElement> elements;
  elements.reserve(nt);
  const int ndof = 3 * ne + ni;
  for (int t = 0; t < nt; ++t)
  {
    const int k = tris[t];
    elements.emplace_back(mesh, k, p);
    const RtnElement &el = elements.back();
    const auto &v = mesh.cell(k).vertices;
    const int la = static_cast<int>(std::find(v.begin(), v.end(), a) - v.begin());
    const Eigen::Vector2d grad_psi = barycentric_gradients(mesh, k).row(la).transpose();

    const QuadratureRule &rule = triangle_rule(2 * p + 2 + extra_order);
    auto xs = physical_points(mesh, k, rule.points);
    auto gu = gradients_in_host(u, k, xs);
    ScaledMonomials qb;
    qb.center = (mesh.vertex(v[0]) + mesh.vertex(v[1]) + mesh.vertex(v[2])) / 3.0;
    qb.scale = mesh.diameter(k);
    qb.degree = p;

    Eigen::MatrixXd a_loc = Eigen::MatrixXd::Zero(ndof, ndof);
    Eigen::MatrixXd b_loc = Eigen::MatrixXd::Zero(nq, ndof);
    Eigen::VectorXd f_loc = Eigen::VectorXd::Zero(ndof);
    Eigen::VectorXd g_loc = Eigen::VectorXd::Zero(nq);
    Eigen::VectorXd c_loc = Eigen::VectorXd::Zero(nq);
    Eigen::Matrix<double, Eigen::Dynamic, 2> phi(ndof, 2);
    Eigen::VectorXd div(ndof), qv(nq);
    const double jac = 2.0 * mesh.area(k);
    for (int q = 0; q < rule.size(); ++q)
    {
      const double w = rule.weights[q] * jac;
      el.evaluate(xs[q], phi, div);
      qb.evaluate(xs[q], qv);
      const double psi = rule.points[q][la];
      const Eigen::Vector2d g = gu.row(q).transpose();
      a_loc.noalias() += w * phi * phi.transpose();
      b_loc.noalias() += w * qv * div.transpose();
      f_loc.noalias() -= w * psi * (phi * g);
      g_loc += w * (f(xs[q]) * psi - g.dot(grad_psi)) * qv;
      c_loc += w * qv;
    }

    const auto &map = dof_map[t];
    const int q0 = nflux + t * nq;
    for (int i = 0; i < ndof; ++i)
    {
      const int gi = map[i];
      if (gi < 0)
      {
        continue;
      }
      rhs[gi] += f_loc[i];
      for (int j = 0; j < ndof; ++j)
      {
        if (map[j] >= 0)
        {
          kkt(gi, map[j]) += a_loc(i, j);
        }
      }
      for (int r = 0; r < nq; ++r)
      {
        kkt(q0 + r, gi) += b_loc(r, i);
        kkt(gi, q0 + r) += b_loc(r, i);
      }
    }
    rhs.segment(q0, nq) += g_loc;
    if (nmult)
    {
      kkt.block(q0, n - 1, nq, 1) += c_loc;
      kkt.block(n - 1, q0, 1, nq) += c_loc.transpose();
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite())
  {
    throw std::runtime_error("patch_flux: singular local mixed system at vertex " +
                             std::to_string(a));
  }

  PatchFlux out;
  out.vertex = a;
  out.degree = p;
  out.triangles = tris;
  out.raw.resize(nt);
  for (int t = 0; t < nt; ++t)
  {
    Eigen::VectorXd nodal = Eigen::VectorXd::Zero(ndof);
    for (int i = 0; i < ndof; ++i)
    {
      if (dof_map[t][i] >= 0)
      {
        nodal[i] = x[dof_map[t][i]];
      }
    }
    out.raw[t] = elements[t].nodal_to_raw() * nodal;
  }
  return out;
}

FluxField equilibrated_flux(const FeFunction &u, const ScalarField &f, int extra_order)
{
  const Mesh &mesh = u.space().mesh();
  FluxField sigma(u.space().mesh_ptr());
  for (int a = 0; a < mesh.num_vertices(); ++a)
  {
    PatchFlux pf = patch_flux(u, f, a, extra_order);
    for (std::size_t t = 0; t < pf.triangles.size(); ++t)
    {
      sigma.add(pf.triangles[t], pf.degree, std::move(pf.raw[t]));
    }
  }
  return sigma;
}

EstimatorResult flux_indicators(const FeFunction &u, const FluxField &sigma, const ScalarField &f,
                                int extra_order)
{
  const HpSpace &space = u.space();
  const Mesh &mesh = space.mesh();
  const int nt = mesh.num_triangles();
  EstimatorResult res;
  res.eta.resize(nt);
  res.flux_part.resize(nt);
  res.oscillation.resize(nt);
  double total = 0.0;
  for (int k = 0; k < nt; ++k)
  {
    const int ps = std::max(sigma.degree(k), 0);
    const int order = 2 * std::max(space.degree(k), ps + 1) + extra_order;
    const QuadratureRule &rule = triangle_rule(order);
    auto xs = physical_points(mesh, k, rule.points);
    auto gu = gradients_in_host(u, k, xs);

    // Evaluate all contributions with their raw bases once per point set.
    Eigen::Matrix<double, Eigen::Dynamic, 2> sv =
        Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(rule.size(), 2);
    Eigen::VectorXd sd = Eigen::VectorXd::Zero(rule.size());
    for (const auto &c : sigma.contributions(k))
    {
      RtnRawBasis basis(mesh, k, c.degree);
      Eigen::Matrix<double, Eigen::Dynamic, 2> v(basis.size(), 2);
      Eigen::VectorXd d(basis.size());
      for (int q = 0; q < rule.size(); ++q)
      {
        basis.evaluate(xs[q], v, d);
        sv.row(q) += (v.transpose() * c.raw).transpose();
        sd[q] += d.dot(c.raw);
      }
    }
    const double jac = 2.0 * mesh.area(k);
    double flux = 0.0, osc = 0.0;
    for (int q = 0; q < rule.size(); ++q)
    {
      const double w = rule.weights[q] * jac;
      flux += w * (gu.row(q) + sv.row(q)).squaredNorm();
      const double r = f(xs[q]) - sd[q];
      osc += w * r * r;
    }
    res.flux_part[k] = std::sqrt(flux);
    res.oscillation[k] = mesh.diameter(k) / std::numbers::pi * std::sqrt(osc);
    res.eta[k] = res.flux_part[k] + res.oscillation[k];
    total += res.eta[k] * res.eta[k];
  }
  res.total = std::sqrt(total);
  return res;
}

EstimatorResult estimate(const FeFunction &u, const ScalarField &f, int extra_order)
{
  FluxField sigma = equilibrated_flux(u, f, extra_order);
  return flux_indicators(u, sigma, f, extra_order);
}

}  // namespace hpfem
