#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "hpfem/assembly.hpp"
#include "hpfem/rtn.hpp"

namespace hpfem
{

/// Piecewise RTN field stored as a sum of per-triangle contributions, each in
/// the raw basis of its own degree.
class FluxField
{
public:
  struct Contribution
  {
    int degree;
    Eigen::VectorXd raw;
  };

  explicit FluxField(std::shared_ptr<const Mesh> mesh);

  const Mesh &mesh() const { return *mesh_; }
  void add(int k, int degree, Eigen::VectorXd raw);
  const std::vector<Contribution> &contributions(int k) const { return parts_[k]; }
  /// Largest contribution degree on triangle k (-1 if none).
  int degree(int k) const;

  Eigen::Vector2d value(int k, const Point &x) const;
  double divergence(int k, const Point &x) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::vector<Contribution>> parts_;
};

/// Local flux of the patch of vertex a: minimises ||sigma + psi_a grad u||
/// over RTN_p fields on the patch with div sigma equal to the L2 projection of
/// f psi_a - grad u . grad psi_a onto P_p. p is the largest degree on the patch.
struct PatchFlux
{
  int vertex = -1;
  int degree = 0;
  std::vector<int> triangles;
  std::vector<Eigen::VectorXd> raw;  // per patch triangle
};

PatchFlux patch_flux(const FeFunction &u, const ScalarField &f, int a,
                     int extra_order = default_extra_order);

/// Sum of all patch fluxes.
FluxField equilibrated_flux(const FeFunction &u, const ScalarField &f,
                            int extra_order = default_extra_order);

struct EstimatorResult
{
  std::vector<double> eta;          // eta_K
  std::vector<double> flux_part;    // ||grad u + sigma||_K
  std::vector<double> oscillation;  // h_K / pi ||f - div sigma||_K
  double total = 0.0;               // sqrt(sum eta_K^2)
};

/// eta_K = ||grad u + sigma||_K + h_K/pi ||f - div sigma||_K.
EstimatorResult flux_indicators(const FeFunction &u, const FluxField &sigma, const ScalarField &f,
                                int extra_order = default_extra_order);

/// Convenience: flux reconstruction followed by the indicators.
EstimatorResult estimate(const FeFunction &u, const ScalarField &f,
                         int extra_order = default_extra_order);

}  // namespace hpfem
