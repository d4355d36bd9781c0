#pragma once

#include <array>

#include <Eigen/Core>

namespace hpfem
{

/// Legendre polynomials P_0..P_n and their first two derivatives at t.
void legendre(int n, double t, double *p, double *dp, double *ddp = nullptr);

/// Hierarchical H1 shape functions on one triangle: vertex hats, integrated
/// Legendre edge modes of degree 2..edge_degree[i] on every edge, and interior
/// bubbles lambda0 lambda1 lambda2 P_i(l1 - l0) P_j(2 l2 - 1), i + j <= degree - 3.
/// The edge parameter runs from the lower to the higher global vertex id so that
/// traces agree between neighbours; `edge_reversed[i]` is true when this
/// direction runs from local vertex (i+2)%3 to (i+1)%3.
struct ElementShape
{
  int degree = 1;
  std::array<int, 3> edge_degree{1, 1, 1};
  std::array<bool, 3> edge_reversed{false, false, false};

  int num_edge_modes(int i) const { return edge_degree[i] - 1; }
  int num_bubbles() const { return (degree - 1) * (degree - 2) / 2; }
  int size() const
  {
    return 3 + num_edge_modes(0) + num_edge_modes(1) + num_edge_modes(2) + num_bubbles();
  }
  /// Offset of the first mode of edge i in the local ordering.
  int edge_offset(int i) const
  {
    int off = 3;
    for (int j = 0; j < i; ++j)
    {
      off += num_edge_modes(j);
    }
    return off;
  }
  int bubble_offset() const { return edge_offset(3); }

  /// Values and derivatives with respect to (l0, l1, l2), treating the
  /// barycentric coordinates as independent variables. Physical gradients
  /// follow as dlambda * barycentric_gradients.
  void evaluate(const Eigen::Vector3d &lambda, Eigen::Ref<Eigen::VectorXd> values,
                Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 3>> dlambda) const;
};

/// Scaled monomial basis of P_p(K) in coordinates (x - c)/h; used for local
/// L2 projections.
struct ScaledMonomials
{
  Eigen::Vector2d center;
  double scale = 1.0;
  int degree = 0;

  int size() const { return (degree + 1) * (degree + 2) / 2; }
  void evaluate(const Eigen::Vector2d &x, Eigen::Ref<Eigen::VectorXd> values) const;
  void evaluate_gradients(const Eigen::Vector2d &x,
                          Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 2>> grads) const;
};

}  // namespace hpfem
