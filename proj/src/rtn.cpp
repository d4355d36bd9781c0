#include "hpfem/rtn.hpp"

#include <Eigen/LU>

#include "hpfem/quadrature.hpp"

namespace hpfem
{

namespace
{

ScaledMonomials element_monomials(const Mesh &mesh, int k, int degree)
{
  const auto &v = mesh.cell(k).vertices;
  ScaledMonomials m;
  m.center = (mesh.vertex(v[0]) + mesh.vertex(v[1]) + mesh.vertex(v[2])) / 3.0;
  m.scale = mesh.diameter(k);
  m.degree = degree;
  return m;
}

}  // namespace

OrientedEdge oriented_edge(const Mesh &mesh, int a, int b)
{
  if (a > b)
  {
    std::swap(a, b);
  }
  OrientedEdge e;
  e.start = mesh.vertex(a);
  e.end = mesh.vertex(b);
  const Point t = e.end - e.start;
  e.length = t.norm();
  e.normal = Point(t.y(), -t.x()) / e.length;
  return e;
}

RtnRawBasis::RtnRawBasis(const Mesh &mesh, int k, int degree)
    : mono_(element_monomials(mesh, k, degree))
{
}

void RtnRawBasis::evaluate(const Point &x,
                           Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 2>> values,
                           Eigen::Ref<Eigen::VectorXd> divergence) const
{
  const int m = mono_.size();
  const int p = mono_.degree;
  Eigen::VectorXd mv(m);
  Eigen::Matrix<double, Eigen::Dynamic, 2> mg(m, 2);
  mono_.evaluate(x, mv);
  mono_.evaluate_gradients(x, mg);
  values.setZero();
  for (int i = 0; i < m; ++i)
  {
    values(i, 0) = mv[i];
    divergence[i] = mg(i, 0);
    values(m + i, 1) = mv[i];
    divergence[m + i] = mg(i, 1);
  }
  const Point xi = (x - mono_.center) / mono_.scale;
  for (int j = 0; j <= p; ++j)
  {
    const double q = mv[m - p - 1 + j];
    values(2 * m + j, 0) = xi.x() * q;
    values(2 * m + j, 1) = xi.y() * q;
    divergence[2 * m + j] = (p + 2) * q / mono_.scale;
  }
}

RtnElement::RtnElement(const Mesh &mesh, int k, int degree) : raw_(mesh, k, degree)
{
  const int p = degree;
  const int n = raw_.size();
  Eigen::MatrixXd dof(n, n);
  Eigen::Matrix<double, Eigen::Dynamic, 2> vals(n, 2);
  Eigen::VectorXd div(n);
  const auto &v = mesh.cell(k).vertices;

  std::vector<double> leg(p + 2), dleg(p + 2);
  GaussLegendre gl = gauss_legendre(p + 2);
  int row = 0;
  for (int i = 0; i < 3; ++i)
  {
    OrientedEdge e = oriented_edge(mesh, v[(i + 1) % 3], v[(i + 2) % 3]);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(p + 1, n);
    for (std::size_t q = 0; q < gl.points.size(); ++q)
    {
      const double s = gl.points[q];
      const Point x = e.start + 0.5 * (s + 1.0) * (e.end - e.start);
      raw_.evaluate(x, vals, div);
      legendre(p, s, leg.data(), dleg.data());
      Eigen::VectorXd vn = vals * e.normal;
      for (int j = 0; j <= p; ++j)
      {
        block.row(j) += 0.5 * gl.weights[q] * leg[j] * vn.transpose();
      }
    }
    dof.middleRows(row, p + 1) = block;
    row += p + 1;
  }
  if (p >= 1)
  {
    ScaledMonomials test = element_monomials(mesh, k, p - 1);
    const int mt = test.size();
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * mt, n);
    const QuadratureRule &rule = triangle_rule(2 * p + 1);
    Eigen::VectorXd tv(mt);
    for (int q = 0; q < rule.size(); ++q)
    {
      const auto &l = rule.points[q];
      const Point x = l[0] * mesh.vertex(v[0]) + l[1] * mesh.vertex(v[1]) + l[2] * mesh.vertex(v[2]);
      raw_.evaluate(x, vals, div);
      test.evaluate(x, tv);
      // Averaged moments: weights sum to 1/2 on the reference triangle.
      const double w = 2.0 * rule.weights[q];
      block.topRows(mt) += w * tv * vals.col(0).transpose();
      block.bottomRows(mt) += w * tv * vals.col(1).transpose();
    }
    dof.middleRows(row, 2 * mt) = block;
  }
  coeff_ = dof.fullPivLu().inverse();
}

void RtnElement::evaluate(const Point &x,
                          Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 2>> values,
                          Eigen::Ref<Eigen::VectorXd> divergence) const
{
  const int n = size();
  Eigen::Matrix<double, Eigen::Dynamic, 2> rv(n, 2);
  Eigen::VectorXd rd(n);
  raw_.evaluate(x, rv, rd);
  values = coeff_.transpose() * rv;
  divergence = coeff_.transpose() * rd;
}

}  // namespace hpfem
