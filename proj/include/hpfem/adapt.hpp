#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpfem/hp_space.hpp"
#include "hpfem/problems.hpp"

namespace hpfem
{

enum class Strategy
{
  HpResidual,
  Prior,
  Param,
  Apriori,
  Linear,
  HOnly
};

Strategy parse_strategy(std::string_view name);
std::string strategy_name(Strategy s);

/// eta_K^{p-1} = ||grad(u - Pi u)||_K with Pi the L2 projection onto P_{p_K - 1}(K).
double lower_degree_error(const FeFunction &u, int k);

/// h (true) or p (false) decision of the smoothness-based criteria for triangle k.
/// p_K = 1 or a vanishing eta_K^{p-1} always selects p.
bool param_prefers_h(double eta, double eta_lower_degree, int p, double gamma);
bool prior_prefers_h(double eta, double eta_lower_degree, int p);

struct AdaptConfig
{
  Strategy strategy = Strategy::HpResidual;
  double theta = 0.5;
  double gamma = 0.3;
  int max_iter = 100;
  double target_rel_error = 0.0;
  int max_dofs = 0;  // stop once DoF reaches this value (0: no limit)
  /// Mark with the same indicators that enter eta (flux part plus boundary-data term).
  bool boundary_term_in_marking = true;
};

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct IterationRecord
{
  int iteration = 0;
  int triangles = 0;
  int dofs = 0;  // free DOFs
  int max_degree = 0;
  int marked_vertices = 0;
  int flagged_h = 0;
  int flagged_p = 0;
  int flagged_hp = 0;
  double eta = nan_value;           // flux estimator plus boundary-data term
  double eta_boundary = nan_value;  // boundary-data term alone
  double error = nan_value;
  double rel_error = nan_value;
  double effectivity = nan_value;
  double theta_achieved = nan_value;
  double eta_lower = nan_value;
  double c_red = nan_value;
  double c_red_sharp = nan_value;
  double i_red = nan_value;
  double increment = nan_value;  // ||grad(u_{l+1} - u_l)|| over the marked patches
  double lower_bound_effectivity = nan_value;
  int consistency_violations = 0;
  double seconds = 0.0;  // wall time; kept out of the CSV so that reruns compare equal
};

struct AdaptHistory
{
  std::string problem;
  Strategy strategy = Strategy::HpResidual;
  double theta = 0.5;
  double gamma = 0.3;
  std::vector<IterationRecord> rows;
  bool reached_target = false;
};

/// Called after every solve with the row (marking columns still empty) and the space.
using IterationObserver = std::function<void(const IterationRecord &, const HpSpace &)>;

/// SOLVE -> ESTIMATE -> MARK -> REFINE until the target relative error, the
/// DoF limit or max_iter refinements. The certificate columns of row l are completed after
/// the solve on level l+1.
AdaptHistory run_adaptive(const Problem &problem, const AdaptConfig &config,
                          const IterationObserver &observer = {});

void write_csv(std::ostream &os, const AdaptHistory &history);

struct ExponentialFit
{
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Least squares fit of log(e) = log C1 - C2 DoF^{1/3}.
ExponentialFit fit_exponential(std::span<const double> dofs, std::span<const double> rel_errors);
ExponentialFit fit_exponential(const AdaptHistory &history);

}  // namespace hpfem
