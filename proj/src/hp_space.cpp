#include "hpfem/hp_space.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "hpfem/quadrature.hpp"

namespace hpfem
{

HpSpace::HpSpace(std::shared_ptr<const Mesh> mesh, DegreeVector degrees)
  : mesh_(std::move(mesh)), degrees_(std::move(degrees))
{
  const Mesh &m = *mesh_;
  if (static_cast<int>(degrees_.size()) != m.num_triangles())
  {
    throw std::invalid_argument("HpSpace: degree vector length does not match mesh");
  }
  for (int p : degrees_)
  {
    if (p < 1)
    {
      throw std::invalid_argument("HpSpace: polynomial degree must be >= 1, got " +
                                  std::to_string(p));
    }
  }

  // Minimum rule on edges.
  edge_degree_.assign(m.num_edges(), 0);
  for (int e = 0; e < m.num_edges(); ++e)
  {
    const Edge &ed = m.edge(e);
    int p = degrees_[ed.t0];
    if (ed.t1 >= 0)
    {
      p = std::min(p, degrees_[ed.t1]);
    }
    edge_degree_[e] = p;
  }

  int next = m.num_vertices();
  edge_offset_.resize(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e)
  {
    edge_offset_[e] = next;
    next += edge_degree_[e] - 1;
  }
  interior_offset_.resize(m.num_triangles());
  for (int k = 0; k < m.num_triangles(); ++k)
  {
    interior_offset_[k] = next;
    next += (degrees_[k] - 1) * (degrees_[k] - 2) / 2;
  }
  dimension_ = next;

  shapes_.resize(m.num_triangles());
  local_offset_.assign(m.num_triangles() + 1, 0);
  for (int k = 0; k < m.num_triangles(); ++k)
  {
    ElementShape &s = shapes_[k];
    const auto &v = m.cell(k).vertices;
    s.degree = degrees_[k];
    for (int i = 0; i < 3; ++i)
    {
      const int e = m.triangle_edges(k)[i];
      s.edge_degree[i] = edge_degree_[e];
      s.edge_reversed[i] = v[(i + 1) % 3] > v[(i + 2) % 3];
    }
    local_offset_[k + 1] = local_offset_[k] + s.size();
  }
  local_dofs_.resize(local_offset_.back());
  for (int k = 0; k < m.num_triangles(); ++k)
  {
    int *out = local_dofs_.data() + local_offset_[k];
    const auto &v = m.cell(k).vertices;
    for (int i = 0; i < 3; ++i)
    {
      *out++ = v[i];
    }
    for (int i = 0; i < 3; ++i)
    {
      const int e = m.triangle_edges(k)[i];
      for (int j = 0; j < edge_degree_[e] - 1; ++j)
      {
        *out++ = edge_offset_[e] + j;
      }
    }
    for (int j = 0; j < shapes_[k].num_bubbles(); ++j)
    {
      *out++ = interior_offset_[k] + j;
    }
  }

  constrained_.assign(dimension_, false);
  for (int a = 0; a < m.num_vertices(); ++a)
  {
    constrained_[a] = m.is_boundary_vertex(a);
  }
  for (int e = 0; e < m.num_edges(); ++e)
  {
    if (m.edge(e).on_boundary())
    {
      for (int j = 0; j < edge_degree_[e] - 1; ++j)
      {
        constrained_[edge_offset_[e] + j] = true;
      }
    }
  }
  free_index_.assign(dimension_, -1);
  for (int i = 0; i < dimension_; ++i)
  {
    if (!constrained_[i])
    {
      free_index_[i] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(i);
    }
  }
  num_free_ = static_cast<int>(free_dofs_.size());
}

int HpSpace::max_degree() const
{
  return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
}

ElementTabulation tabulate(const HpSpace &space, int k, std::span<const Eigen::Vector3d> points)
{
  const ElementShape &shape = space.shape(k);
  const int nb = shape.size();
  const int nq = static_cast<int>(points.size());
  const Eigen::Matrix<double, 3, 2> g = barycentric_gradients(space.mesh(), k);
  ElementTabulation tab;
  tab.values.resize(nb, nq);
  tab.dx.resize(nb, nq);
  tab.dy.resize(nb, nq);
  Eigen::VectorXd vals(nb);
  Eigen::Matrix<double, Eigen::Dynamic, 3> dl(nb, 3);
  for (int q = 0; q < nq; ++q)
  {
    shape.evaluate(points[q], vals, dl);
    tab.values.col(q) = vals;
    tab.dx.col(q) = dl * g.col(0);
    tab.dy.col(q) = dl * g.col(1);
  }
  return tab;
}

FeFunction::FeFunction(std::shared_ptr<const HpSpace> space)
  : space_(std::move(space)), coefficients_(Eigen::VectorXd::Zero(space_->dimension()))
{
}

FeFunction::FeFunction(std::shared_ptr<const HpSpace> space, Eigen::VectorXd coefficients)
  : space_(std::move(space)), coefficients_(std::move(coefficients))
{
  if (coefficients_.size() != space_->dimension())
  {
    throw std::invalid_argument("FeFunction: coefficient length does not match space");
  }
}

Eigen::VectorXd FeFunction::local_coefficients(int k) const
{
  auto dofs = space_->local_dofs(k);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i)
  {
    c[i] = coefficients_[dofs[i]];
  }
  return c;
}

double FeFunction::value(int k, const Eigen::Vector3d &lambda) const
{
  const ElementShape &shape = space_->shape(k);
  Eigen::VectorXd vals(shape.size());
  Eigen::Matrix<double, Eigen::Dynamic, 3> dl(shape.size(), 3);
  shape.evaluate(lambda, vals, dl);
  return vals.dot(local_coefficients(k));
}

Eigen::Vector2d FeFunction::gradient(int k, const Eigen::Vector3d &lambda) const
{
  const ElementShape &shape = space_->shape(k);
  Eigen::VectorXd vals(shape.size());
  Eigen::Matrix<double, Eigen::Dynamic, 3> dl(shape.size(), 3);
  shape.evaluate(lambda, vals, dl);
  Eigen::Vector3d dlam = dl.transpose() * local_coefficients(k);
  return barycentric_gradients(space_->mesh(), k).transpose() * dlam;
}

int locate(const Mesh &mesh, const Point &x)
{
  int best = -1;
  double best_min = -1e300;
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    Eigen::Vector3d l = barycentric(mesh, k, x);
    const double mn = l.minCoeff();
    if (mn > best_min)
    {
      best_min = mn;
      best = k;
    }
    if (mn >= 0.0)
    {
      return k;
    }
  }
  if (best_min < -1e-12)
  {
    throw std::out_of_range("locate: point outside mesh");
  }
  return best;
}

double FeFunction::operator()(const Point &x) const
{
  const int k = locate(space_->mesh(), x);
  return value(k, barycentric(space_->mesh(), k, x));
}

Eigen::Vector2d FeFunction::gradient_at(const Point &x) const
{
  const int k = locate(space_->mesh(), x);
  return gradient(k, barycentric(space_->mesh(), k, x));
}

namespace
{

// Integrated Legendre edge mode of degree k at t in [-1,1].
double edge_mode(int k, double t)
{
  double p[40], dp[40];
  legendre(k - 1, t, p, dp);
  return -(1.0 - t * t) * dp[k - 1] / (k * (k - 1.0));
}

}  // namespace

Eigen::VectorXd interpolate(const HpSpace &space, const ElementFunction &f, bool boundary_only,
                            int extra_order)
{
  const Mesh &mesh = space.mesh();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space.dimension());

  for (int a = 0; a < mesh.num_vertices(); ++a)
  {
    if (boundary_only && !mesh.is_boundary_vertex(a))
    {
      continue;
    }
    auto tris = mesh.vertex_triangles(a);
    c[a] = f(tris.front(), mesh.vertex(a));
  }

  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const Edge &ed = mesh.edge(e);
    const int pe = space.edge_degree(e);
    if (pe < 2 || (boundary_only && !ed.on_boundary()))
    {
      continue;
    }
    const int nm = pe - 1;
    GaussLegendre gl = gauss_legendre(pe + 1 + extra_order / 2);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nm, nm);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nm);
    Eigen::VectorXd modes(nm);
    const Point &x0 = mesh.vertex(ed.v0);
    const Point &x1 = mesh.vertex(ed.v1);
    for (std::size_t q = 0; q < gl.points.size(); ++q)
    {
      const double t = gl.points[q];
      const double w = gl.weights[q];
      const Point x = 0.5 * (1.0 - t) * x0 + 0.5 * (1.0 + t) * x1;
      const double r = f(ed.t0, x) - 0.5 * (1.0 - t) * c[ed.v0] - 0.5 * (1.0 + t) * c[ed.v1];
      for (int k = 0; k < nm; ++k)
      {
        modes[k] = edge_mode(k + 2, t);
      }
      mass.noalias() += w * modes * modes.transpose();
      rhs += w * r * modes;
    }
    Eigen::VectorXd sol = mass.ldlt().solve(rhs);
    for (int k = 0; k < nm; ++k)
    {
      c[space.edge_dof_offset(e) + k] = sol[k];
    }
  }

  if (boundary_only)
  {
    return c;
  }

  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const ElementShape &shape = space.shape(k);
    const int nbub = shape.num_bubbles();
    if (nbub == 0)
    {
      continue;
    }
    const QuadratureRule &rule = triangle_rule(2 * shape.degree + extra_order);
    ElementTabulation tab = tabulate(space, k, rule.points);
    auto dofs = space.local_dofs(k);
    const int off = shape.bubble_offset();
    const auto &v = mesh.cell(k).vertices;
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nbub, nbub);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nbub);
    for (int q = 0; q < rule.size(); ++q)
    {
      const auto &l = rule.points[q];
      const Point x = l[0] * mesh.vertex(v[0]) + l[1] * mesh.vertex(v[1]) + l[2] * mesh.vertex(v[2]);
      double r = f(k, x);
      for (int i = 0; i < off; ++i)
      {
        r -= c[dofs[i]] * tab.values(i, q);
      }
      auto b = tab.values.col(q).segment(off, nbub);
      mass.noalias() += rule.weights[q] * b * b.transpose();
      rhs += rule.weights[q] * r * b;
    }
    Eigen::VectorXd sol = mass.ldlt().solve(rhs);
    for (int j = 0; j < nbub; ++j)
    {
      c[space.interior_dof_offset(k) + j] = sol[j];
    }
  }
  return c;
}

FeFunction hat_function(std::shared_ptr<const HpSpace> space, int a)
{
  if (a < 0 || a >= space->mesh().num_vertices())
  {
    throw std::out_of_range("hat_function: unknown vertex id " + std::to_string(a));
  }
  FeFunction psi(std::move(space));
  psi.coefficients()[a] = 1.0;
  return psi;
}

FeFunction embed(const FeFunction &coarse, std::shared_ptr<const HpSpace> fine_space)
{
  const Mesh &cm = coarse.space().mesh();
  const Mesh &fm = fine_space->mesh();
  const bool same_mesh = &cm == &fm;
  if (!same_mesh && !(fm.has_parents() && fm.generation() == cm.generation() + 1))
  {
    throw std::invalid_argument("embed: fine mesh is not a direct refinement of the coarse mesh");
  }
  std::vector<int> host(fm.num_triangles());
  for (int k = 0; k < fm.num_triangles(); ++k)
  {
    host[k] = same_mesh ? k : fm.parent(k);
    if (host[k] < 0 || host[k] >= cm.num_triangles())
    {
      throw std::invalid_argument("embed: parent map refers to an unknown coarse triangle");
    }
    if (fine_space->degree(k) < coarse.space().degree(host[k]))
    {
      throw std::invalid_argument("embed: polynomial degree decreased under refinement");
    }
  }
  ElementFunction f = [&](int k, const Point &x) {
    return coarse.value(host[k], barycentric(cm, host[k], x));
  };
  return FeFunction(fine_space, interpolate(*fine_space, f, false, 2));
}

}  // namespace hpfem
