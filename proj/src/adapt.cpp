#include "hpfem/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "hpfem/flux_estimator.hpp"
#include "hpfem/hp_refine.hpp"
#include "hpfem/marking.hpp"
#include "hpfem/quadrature.hpp"
#include "hpfem/reduction_certificate.hpp"

namespace hpfem
{

Strategy parse_strategy(std::string_view name)
{
  if (name == "hp-residual")
  {
    return Strategy::HpResidual;
  }
  if (name == "prior")
  {
    return Strategy::Prior;
  }
  if (name == "param")
  {
    return Strategy::Param;
  }
  if (name == "apriori")
  {
    return Strategy::Apriori;
  }
  if (name == "linear")
  {
    return Strategy::Linear;
  }
  if (name == "h-only")
  {
    return Strategy::HOnly;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

std::string strategy_name(Strategy s)
{
  switch (s)
  {
  case Strategy::HpResidual:
    return "hp-residual";
  case Strategy::Prior:
    return "prior";
  case Strategy::Param:
    return "param";
  case Strategy::Apriori:
    return "apriori";
  case Strategy::Linear:
    return "linear";
  case Strategy::HOnly:
    return "h-only";
  }
  return "unknown";
}

double lower_degree_error(const FeFunction &u, int k)
{
  const HpSpace &space = u.space();
  const Mesh &mesh = space.mesh();
  const int p = space.degree(k);
  if (p < 2)
  {
    return nan_value;
  }
  const auto &v = mesh.cell(k).vertices;
  ScaledMonomials mono;
  mono.center = (mesh.vertex(v[0]) + mesh.vertex(v[1]) + mesh.vertex(v[2])) / 3.0;
  mono.scale = mesh.diameter(k);
  mono.degree = p - 1;
  const int m = mono.size();

  const QuadratureRule &rule = triangle_rule(2 * p + 2);
  ElementTabulation tab = tabulate(space, k, rule.points);
  const Eigen::VectorXd c = u.local_coefficients(k);
  const Eigen::VectorXd uq = tab.values.transpose() * c;
  const Eigen::VectorXd gx = tab.dx.transpose() * c;
  const Eigen::VectorXd gy = tab.dy.transpose() * c;

  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> mg(rule.size(),
                                                          Eigen::Matrix<double, Eigen::Dynamic, 2>(m, 2));
  Eigen::VectorXd vals(m);
  for (int q = 0; q < rule.size(); ++q)
  {
    const auto &l = rule.points[q];
    const Point x = l[0] * mesh.vertex(v[0]) + l[1] * mesh.vertex(v[1]) + l[2] * mesh.vertex(v[2]);
    mono.evaluate(x, vals);
    mono.evaluate_gradients(x, mg[q]);
    mass += rule.weights[q] * vals * vals.transpose();
    rhs += rule.weights[q] * uq[q] * vals;
  }
  const Eigen::VectorXd proj = mass.ldlt().solve(rhs);
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q)
  {
    const Eigen::Vector2d gp = mg[q].transpose() * proj;
    sum += rule.weights[q] * ((gx[q] - gp.x()) * (gx[q] - gp.x()) + (gy[q] - gp.y()) * (gy[q] - gp.y()));
  }
  return std::sqrt(2.0 * mesh.area(k) * sum);
}

bool param_prefers_h(double eta, double eta_lower_degree, int p, double gamma)
{
  if (p < 2 || !(eta_lower_degree > 0.0))
  {
    return false;
  }
  return eta / eta_lower_degree > gamma;
}

bool prior_prefers_h(double eta, double eta_lower_degree, int p)
{
  if (p < 2 || !(eta_lower_degree > 0.0))
  {
    return false;
  }
  const double s = 1.0 - std::log(eta / eta_lower_degree) / std::log(p / (p - 1.0));
  return p > s - 1.0;
}

namespace
{

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double distance_to_segment(const Point &x, const Point &a, const Point &b)
{
  const Point d = b - a;
  const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - x).norm();
}

double distance_to_origin(const Mesh &mesh, int k)
{
  const Eigen::Vector3d l = barycentric(mesh, k, Point::Zero());
  if (l.minCoeff() >= -1e-14)
  {
    return 0.0;
  }
  const auto &v = mesh.cell(k).vertices;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
  {
    d = std::min(d, distance_to_segment(Point::Zero(), mesh.vertex(v[i]), mesh.vertex(v[(i + 1) % 3])));
  }
  return d;
}

bool touches_origin(const Mesh &mesh, int k)
{
  for (int a : mesh.cell(k).vertices)
  {
    if (mesh.vertex(a).norm() < 1e-14)
    {
      return true;
    }
  }
  return false;
}

// Triangles whose degree may be raised: p_K equals the minimum degree of the
// patch of some marked vertex of K.
std::vector<char> raisable(const Mesh &mesh, const DegreeVector &p, std::span<const int> marked)
{
  std::vector<char> ok(mesh.num_triangles(), 0);
  for (int a : marked)
  {
    VertexPatch patch = vertex_patch(mesh, a);
    std::vector<int> delta = degree_increments(mesh, p, a);
    for (std::size_t t = 0; t < patch.triangles.size(); ++t)
    {
      if (delta[t])
      {
        ok[patch.triangles[t]] = 1;
      }
    }
  }
  return ok;
}

struct Flags
{
  std::vector<int> h, p;  // sorted triangle ids
  DegreeVector target;
  std::vector<int> h_vertices;
};

void count_flags(const Flags &fl, IterationRecord &row)
{
  std::vector<int> both;
  std::set_intersection(fl.h.begin(), fl.h.end(), fl.p.begin(), fl.p.end(), std::back_inserter(both));
  row.flagged_hp = static_cast<int>(both.size());
  row.flagged_h = static_cast<int>(fl.h.size()) - row.flagged_hp;
  row.flagged_p = static_cast<int>(fl.p.size()) - row.flagged_hp;
}

// Degrees of the LINEAR strategy: layer 1 touches the origin; other layers are
// dyadic distance bands measured in units of the layer-1 size.
DegreeVector linear_degrees(const Mesh &mesh)
{
  double h1 = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    if (touches_origin(mesh, k))
    {
      h1 = std::max(h1, mesh.diameter(k));
    }
  }
  DegreeVector p(mesh.num_triangles(), 1);
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    int layer = 1;
    if (!touches_origin(mesh, k))
    {
      const double d = distance_to_origin(mesh, k);
      layer = std::max(2, 1 + static_cast<int>(std::ceil(std::log2(d / h1) - 1e-12)));
    }
    p[k] = static_cast<int>(std::ceil(1.0 + (layer - 1) / 3.0 - 1e-12));
  }
  return p;
}

}  // namespace

AdaptHistory run_adaptive(const Problem &problem, const AdaptConfig &config,
                          const IterationObserver &observer)
{
  if (!(config.theta > 0.0 && config.theta <= 1.0))
  {
    throw std::invalid_argument("run_adaptive: theta must lie in (0, 1]");
  }
  if (config.strategy == Strategy::Param && !(config.gamma > 0.0))
  {
    throw std::invalid_argument("run_adaptive: param strategy requires gamma > 0");
  }
  const bool linear = config.strategy == Strategy::Linear;
  if ((linear || config.strategy == Strategy::Apriori) && problem.domain != DomainShape::LShape)
  {
    throw std::invalid_argument("run_adaptive: " + strategy_name(config.strategy) +
                                " needs the L-shaped domain");
  }

  AdaptHistory history;
  history.problem = problem.name;
  history.strategy = config.strategy;
  history.theta = config.theta;
  history.gamma = config.gamma;

  auto mesh = std::make_shared<const Mesh>(
      build_initial_mesh(problem.domain, linear ? 0.5 : problem.initial_h));
  DegreeVector degrees(mesh->num_triangles(), 1);

  // Data of the previous level needed to finish its certificate columns.
  std::optional<FeFunction> previous;
  std::vector<int> previous_marked_triangles;

  for (int it = 0;; ++it)
  {
    const auto t0 = std::chrono::steady_clock::now();
    auto space = std::make_shared<const HpSpace>(mesh, degrees);
    FeFunction u = [&] {
      try
      {
        return solve_primal(space, problem.f, problem.g, problem.extra_order);
      }
      catch (const std::exception &e)
      {
        throw std::runtime_error("iteration " + std::to_string(it) + ": " + e.what());
      }
    }();

    std::vector<double> err_sq = energy_error_squared(u, problem.grad_u, problem.error_quadrature);
    double err = 0.0;
    for (double e : err_sq)
    {
      err += e;
    }
    err = std::sqrt(err);

    if (previous && !history.rows.empty())
    {
      IterationRecord &prev = history.rows.back();
      if (std::isfinite(prev.c_red_sharp))
      {
        prev.i_red = prev.c_red_sharp / (err / prev.error);
      }
      if (!previous_marked_triangles.empty())
      {
        prev.increment = increment_norm(*previous, u, previous_marked_triangles);
        if (prev.eta_lower > 0.0)
        {
          prev.lower_bound_effectivity = prev.increment / prev.eta_lower;
        }
      }
    }

    EstimatorResult est = estimate(u, problem.f, problem.extra_order);
    std::vector<double> eta_d = dirichlet_indicators(u, problem.g);
    double eta_f_sq = 0.0, eta_d_sq = 0.0;
    for (int k = 0; k < mesh->num_triangles(); ++k)
    {
      eta_f_sq += est.eta[k] * est.eta[k];
      eta_d_sq += eta_d[k] * eta_d[k];
    }

    IterationRecord row;
    row.iteration = it;
    row.triangles = mesh->num_triangles();
    row.dofs = space->num_free();
    row.max_degree = space->max_degree();
    row.eta_boundary = std::sqrt(eta_d_sq);
    row.eta = std::sqrt(eta_f_sq + eta_d_sq);
    row.error = err;
    row.rel_error = err / problem.energy;
    row.effectivity = row.eta / err;
    if (observer)
    {
      observer(row, *space);
    }

    const bool target_reached = config.target_rel_error > 0.0 && row.rel_error <= config.target_rel_error;
    history.reached_target = target_reached;
    const bool too_large = config.max_dofs > 0 && row.dofs >= config.max_dofs;
    if (target_reached || too_large || it >= config.max_iter)
    {
      row.seconds = seconds_since(t0);
      history.rows.push_back(row);
      break;
    }

    std::vector<double> eta_mark = est.eta;
    if (config.boundary_term_in_marking)
    {
      for (int k = 0; k < mesh->num_triangles(); ++k)
      {
        eta_mark[k] = std::sqrt(est.eta[k] * est.eta[k] + eta_d[k] * eta_d[k]);
      }
    }

    Flags fl;
    fl.target = degrees;
    MarkedVertexSet marked;
    if (linear)
    {
      std::vector<int> corner;
      for (int k = 0; k < mesh->num_triangles(); ++k)
      {
        if (touches_origin(*mesh, k))
        {
          corner.push_back(k);
        }
      }
      fl.h = corner;
    }
    else
    {
      marked = mark_vertices(*mesh, eta_mark, config.theta);
      if (marked.vertices.empty())
      {
        row.seconds = seconds_since(t0);
        history.rows.push_back(row);
        break;
      }
      row.marked_vertices = static_cast<int>(marked.vertices.size());
      row.theta_achieved = marked.theta_achieved;

      switch (config.strategy)
      {
      case Strategy::HpResidual: {
        HpDecision d = hp_decision(u, problem.f, marked.vertices, problem.extra_order);
        fl.h = d.triangles_h;
        fl.p = d.triangles_p;
        fl.target = d.target_degrees;
        fl.h_vertices = d.vertices_h;
        break;
      }
      case Strategy::HOnly:
        fl.h = marked.triangles;
        break;
      case Strategy::Prior:
      case Strategy::Param:
      case Strategy::Apriori: {
        std::vector<char> up = raisable(*mesh, degrees, marked.vertices);
        for (int k : marked.triangles)
        {
          bool h = false;
          if (config.strategy == Strategy::Apriori)
          {
            h = touches_origin(*mesh, k);
          }
          else
          {
            const double low = lower_degree_error(u, k);
            h = config.strategy == Strategy::Param
                    ? param_prefers_h(est.eta[k], low, degrees[k], config.gamma)
                    : prior_prefers_h(est.eta[k], low, degrees[k]);
          }
          if (h)
          {
            fl.h.push_back(k);
          }
          else
          {
            fl.p.push_back(k);
            if (up[k])
            {
              fl.target[k] = degrees[k] + 1;
            }
          }
        }
        break;
      }
      case Strategy::Linear:
        break;
      }
    }
    count_flags(fl, row);

    RefinementPlan plan = next_level(mesh, fl.h, fl.target, fl.h_vertices);
    if (linear)
    {
      // Second bisection round of the corner patch halves the local mesh size.
      std::vector<int> corner;
      for (int k = 0; k < plan.mesh->num_triangles(); ++k)
      {
        if (touches_origin(*plan.mesh, k))
        {
          corner.push_back(k);
        }
      }
      auto twice = std::make_shared<const Mesh>(bisect(*plan.mesh, corner));
      // Re-parent onto the current mesh so that the hierarchy stays one level deep.
      std::vector<int> parents(twice->num_triangles());
      for (int k = 0; k < twice->num_triangles(); ++k)
      {
        parents[k] = plan.mesh->parent(twice->parent(k));
      }
      auto merged = std::make_shared<const Mesh>(twice->vertices(), twice->cells(),
                                                 mesh->generation() + 1, std::move(parents));
      DegreeVector layer = linear_degrees(*merged);
      plan.degrees.resize(merged->num_triangles());
      for (int k = 0; k < merged->num_triangles(); ++k)
      {
        plan.degrees[k] = std::max(layer[k], degrees[merged->parent(k)]);
      }
      plan.mesh = merged;
    }
    row.consistency_violations = plan.consistency_violations;

    if (config.strategy == Strategy::HpResidual)
    {
      auto next_space = std::make_shared<const HpSpace>(plan.mesh, plan.degrees);
      std::vector<PatchLiftingOnNext> lifts;
      lifts.reserve(marked.vertices.size());
      for (int a : marked.vertices)
      {
        lifts.push_back(hp_lifting(u, problem.f, a, next_space, problem.extra_order));
      }
      LowerBound lb = lower_bound(lifts, *plan.mesh);
      row.eta_lower = lb.value;
      const double eta_total = config.boundary_term_in_marking ? marked.eta_total : row.eta;
      ReductionFactor rf = reduction_factor(config.theta, lb.value, marked.eta_marked, eta_total);
      row.c_red = rf.c_red;
      row.c_red_sharp = rf.c_red_sharp;
      previous_marked_triangles = marked.triangles;
    }
    else
    {
      previous_marked_triangles.clear();
    }

    row.seconds = seconds_since(t0);
    history.rows.push_back(row);
    previous = std::move(u);
    mesh = plan.mesh;
    degrees = std::move(plan.degrees);
  }
  return history;
}

void write_csv(std::ostream &os, const AdaptHistory &history)
{
  os << "iteration,triangles,dofs,max_degree,marked_vertices,flagged_h,flagged_p,flagged_hp,"
        "eta,eta_boundary,error,rel_error,effectivity,theta_l,eta_lower,c_red,c_red_sharp,i_red,"
        "increment,lower_bound_effectivity,consistency_violations\n";
  auto num = [&](double x) -> std::ostream & {
    if (std::isnan(x))
    {
      return os << "nan";
    }
    return os << std::setprecision(12) << x;
  };
  for (const auto &r : history.rows)
  {
    os << r.iteration << ',' << r.triangles << ',' << r.dofs << ',' << r.max_degree << ','
       << r.marked_vertices << ',' << r.flagged_h << ',' << r.flagged_p << ',' << r.flagged_hp << ',';
    for (double x : {r.eta, r.eta_boundary, r.error, r.rel_error, r.effectivity, r.theta_achieved,
                     r.eta_lower, r.c_red, r.c_red_sharp, r.i_red, r.increment,
                     r.lower_bound_effectivity})
    {
      num(x) << ',';
    }
    os << r.consistency_violations << '\n';
  }
}

ExponentialFit fit_exponential(std::span<const double> dofs, std::span<const double> rel_errors)
{
  if (dofs.size() != rel_errors.size())
  {
    throw std::invalid_argument("fit_exponential: size mismatch");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < dofs.size(); ++i)
  {
    if (rel_errors[i] > 0.0 && std::isfinite(rel_errors[i]))
    {
      xs.push_back(std::cbrt(dofs[i]));
      ys.push_back(std::log(rel_errors[i]));
    }
  }
  if (xs.size() < 3)
  {
    throw std::invalid_argument("fit_exponential: need at least 3 positive errors");
  }
  if (*std::max_element(xs.begin(), xs.end()) == *std::min_element(xs.begin(), xs.end()))
  {
    throw std::invalid_argument("fit_exponential: all DoF values are identical");
  }
  Eigen::MatrixXd a(xs.size(), 2);
  Eigen::VectorXd b(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    a(i, 0) = 1.0;
    a(i, 1) = -xs[i];
    b[i] = ys[i];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  return {std::exp(c[0]), c[1]};
}

ExponentialFit fit_exponential(const AdaptHistory &history)
{
  std::vector<double> d, e;
  for (const auto &r : history.rows)
  {
    d.push_back(r.dofs);
    e.push_back(r.rel_error);
  }
  return fit_exponential(d, e);
}

}  // namespace hpfem
