#pragma once

#include <Eigen/Core>

#include "hpfem/mesh.hpp"
#include "hpfem/shape.hpp"

namespace hpfem
{

/// Raw basis of RTN_p(K): [P_p]^2 in scaled monomials followed by x~ * q for
/// the homogeneous scaled monomials q of degree p, where x~ = (x - c_K)/h_K.
/// Dimension (p+1)(p+3).
class RtnRawBasis
{
public:
  RtnRawBasis(const Mesh &mesh, int k, int degree);

  int degree() const { return mono_.degree; }
  int size() const { return 2 * mono_.size() + mono_.degree + 1; }

  /// Rows of `values` are basis functions; `divergence` holds their divergence.
  void evaluate(const Point &x, Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 2>> values,
                Eigen::Ref<Eigen::VectorXd> divergence) const;

private:
  ScaledMonomials mono_;
};

/// Nodal RTN_p basis on one triangle. Degrees of freedom, in order:
/// for each local edge i, the averaged normal moments against Legendre
/// polynomials L_0..L_p in the edge parameter running from the lower to the
/// higher global vertex id, with the normal obtained by turning that direction
/// clockwise; then averaged interior moments against [P_{p-1}]^2.
class RtnElement
{
public:
  RtnElement(const Mesh &mesh, int k, int degree);

  int degree() const { return raw_.degree(); }
  int size() const { return raw_.size(); }
  static int edge_dofs(int p) { return p + 1; }
  static int interior_dofs(int p) { return p * (p + 1); }

  const RtnRawBasis &raw() const { return raw_; }
  /// Column j holds the raw coefficients of nodal basis function j.
  const Eigen::MatrixXd &nodal_to_raw() const { return coeff_; }

  /// Evaluates the nodal basis functions at x.
  void evaluate(const Point &x, Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 2>> values,
                Eigen::Ref<Eigen::VectorXd> divergence) const;

private:
  RtnRawBasis raw_;
  Eigen::MatrixXd coeff_;
};

/// Unit normal and parameter of a mesh edge in the global orientation.
struct OrientedEdge
{
  Point start, end, normal;
  double length;
};
OrientedEdge oriented_edge(const Mesh &mesh, int a, int b);

}  // namespace hpfem
