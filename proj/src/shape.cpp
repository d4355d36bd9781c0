#include "hpfem/shape.hpp"

#include <cmath>

namespace hpfem
{

void legendre(int n, double t, double *p, double *dp, double *ddp)
{
  p[0] = 1.0;
  dp[0] = 0.0;
  if (ddp)
  {
    ddp[0] = 0.0;
  }
  if (n >= 1)
  {
    p[1] = t;
    dp[1] = 1.0;
    if (ddp)
    {
      ddp[1] = 0.0;
    }
  }
  for (int k = 2; k <= n; ++k)
  {
    p[k] = ((2.0 * k - 1.0) * t * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
    dp[k] = k * p[k - 1] + t * dp[k - 1];
    if (ddp)
    {
      ddp[k] = (k + 1.0) * dp[k - 1] + t * ddp[k - 1];
    }
  }
}

void ElementShape::evaluate(const Eigen::Vector3d &lambda, Eigen::Ref<Eigen::VectorXd> values,
                            Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 3>> dlambda) const
{
  constexpr int max_deg = 32;
  double p[max_deg + 2], dp[max_deg + 2], ddp[max_deg + 2];

  dlambda.setZero();
  for (int i = 0; i < 3; ++i)
  {
    values[i] = lambda[i];
    dlambda(i, i) = 1.0;
  }

  int idx = 3;
  for (int i = 0; i < 3; ++i)
  {
    const int pe = edge_degree[i];
    if (pe < 2)
    {
      continue;
    }
    int s = (i + 1) % 3, e = (i + 2) % 3;
    if (edge_reversed[i])
    {
      std::swap(s, e);
    }
    const double ls = lambda[s], le = lambda[e];
    const double t = le - ls;
    legendre(pe - 1, t, p, dp, ddp);
    for (int k = 2; k <= pe; ++k)
    {
      const double c = -4.0 / (k * (k - 1.0));
      values[idx] = c * ls * le * dp[k - 1];
      dlambda(idx, s) = c * (le * dp[k - 1] - ls * le * ddp[k - 1]);
      dlambda(idx, e) = c * (ls * dp[k - 1] + ls * le * ddp[k - 1]);
      ++idx;
    }
  }

  if (degree >= 3)
  {
    const int nb = degree - 3;
    const double s = lambda[1] - lambda[0];
    const double r = 2.0 * lambda[2] - 1.0;
    double ps[max_deg + 2], dps[max_deg + 2], pr[max_deg + 2], dpr[max_deg + 2];
    legendre(nb, s, ps, dps);
    legendre(nb, r, pr, dpr);
    const double b = lambda[0] * lambda[1] * lambda[2];
    for (int n = 0; n <= nb; ++n)
    {
      for (int a = n; a >= 0; --a)
      {
        const int j = n - a;
        const double pp = ps[a] * pr[j];
        values[idx] = b * pp;
        dlambda(idx, 0) = lambda[1] * lambda[2] * pp - b * dps[a] * pr[j];
        dlambda(idx, 1) = lambda[0] * lambda[2] * pp + b * dps[a] * pr[j];
        dlambda(idx, 2) = lambda[0] * lambda[1] * pp + 2.0 * b * ps[a] * dpr[j];
        ++idx;
      }
    }
  }
}

void ScaledMonomials::evaluate(const Eigen::Vector2d &x, Eigen::Ref<Eigen::VectorXd> values) const
{
  const double xi = (x.x() - center.x()) / scale;
  const double eta = (x.y() - center.y()) / scale;
  int idx = 0;
  for (int n = 0; n <= degree; ++n)
  {
    for (int i = n; i >= 0; --i)
    {
      values[idx++] = std::pow(xi, i) * std::pow(eta, n - i);
    }
  }
}

void ScaledMonomials::evaluate_gradients(
    const Eigen::Vector2d &x, Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, 2>> grads) const
{
  const double xi = (x.x() - center.x()) / scale;
  const double eta = (x.y() - center.y()) / scale;
  int idx = 0;
  for (int n = 0; n <= degree; ++n)
  {
    for (int i = n; i >= 0; --i)
    {
      const int j = n - i;
      grads(idx, 0) = i > 0 ? i * std::pow(xi, i - 1) * std::pow(eta, j) / scale : 0.0;
      grads(idx, 1) = j > 0 ? j * std::pow(xi, i) * std::pow(eta, j - 1) / scale : 0.0;
      ++idx;
    }
  }
}

}  // namespace hpfem
