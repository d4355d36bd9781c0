#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hpfem/adapt.hpp"
#include "hpfem/flux_estimator.hpp"
#include "hpfem/hp_refine.hpp"
#include "hpfem/marking.hpp"
#include "support/oracles.hpp"

using namespace hpfem;
using namespace hpfem::oracle;

namespace
{

void check_partition(const Mesh &, const DegreeVector &p, const MarkedVertexSet &m,
                     const HpDecision &d, const RefinementPlan &plan)
{
  std::vector<int> both = d.vertices_h;
  both.insert(both.end(), d.vertices_p.begin(), d.vertices_p.end());
  std::sort(both.begin(), both.end());
  std::vector<int> marked = m.vertices;
  std::sort(marked.begin(), marked.end());
  EXPECT_EQ(both, marked);
  std::vector<int> mh_mp = d.triangles_h;
  mh_mp.insert(mh_mp.end(), d.triangles_p.begin(), d.triangles_p.end());
  std::sort(mh_mp.begin(), mh_mp.end());
  mh_mp.erase(std::unique(mh_mp.begin(), mh_mp.end()), mh_mp.end());
  EXPECT_EQ(mh_mp, m.triangles);
  for (int k = 0; k < plan.mesh->num_triangles(); ++k)
  {
    EXPECT_GE(plan.degrees[k], p[plan.mesh->parent(k)]);
  }
}

}  // namespace

TEST(Adapt, PythagorasOverFiveSteps)
{
  const Problem pr = smooth_problem();
  const auto levels = hp_levels(pr, 5, check_partition);
  for (std::size_t l = 0; l + 1 < levels.size(); ++l)
  {
    const FeFunction coarse = embed(levels[l].u, levels[l + 1].space);
    FeFunction diff = levels[l + 1].u;
    diff.coefficients() -= coarse.coefficients();
    const double inc = energy_norm(diff, {}, 4);
    const double e0 = error_squared(levels[l].u, pr), e1 = error_squared(levels[l + 1].u, pr);
    EXPECT_NEAR(e1, e0 - inc * inc, 1e-6 * e0) << "step " << l;
  }
}

TEST(Adapt, ConsecutiveSpacesAreNested)
{
  const Problem pr = smooth_problem();
  const auto levels = hp_levels(pr, 3);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> c(-0.999, 0.999);
  for (std::size_t l = 0; l + 1 < levels.size(); ++l)
  {
    const FeFunction e = embed(levels[l].u, levels[l + 1].space);
    for (int i = 0; i < 50; ++i)
    {
      const Point x(c(rng), c(rng));
      EXPECT_NEAR(e(x), levels[l].u(x), 1e-12);
      EXPECT_NEAR((e.gradient_at(x) - levels[l].u.gradient_at(x)).norm(), 0.0, 1e-10);
    }
  }
}

TEST(Adapt, ZeroIterationsGivesSingleRow)
{
  AdaptConfig cfg;
  cfg.max_iter = 0;
  const AdaptHistory h = run_adaptive(smooth_problem(), cfg);
  ASSERT_EQ(h.rows.size(), 1u);
  EXPECT_EQ(h.rows[0].iteration, 0);
  EXPECT_GT(h.rows[0].error, 0.0);
}

TEST(Adapt, RejectsInvalidConfigurations)
{
  AdaptConfig cfg;
  cfg.theta = 0.0;
  EXPECT_THROW(run_adaptive(smooth_problem(), cfg), std::invalid_argument);
  cfg.theta = 0.5;
  cfg.strategy = Strategy::Param;
  cfg.gamma = 0.0;
  EXPECT_THROW(run_adaptive(smooth_problem(), cfg), std::invalid_argument);
  cfg.strategy = Strategy::Apriori;
  EXPECT_THROW(run_adaptive(smooth_problem(), cfg), std::invalid_argument);
  cfg.strategy = Strategy::Linear;
  EXPECT_THROW(run_adaptive(smooth_problem(), cfg), std::invalid_argument);
  EXPECT_THROW(parse_strategy("hp"), std::invalid_argument);
}

TEST(Adapt, StrategyNamesRoundTrip)
{
  for (Strategy s : {Strategy::HpResidual, Strategy::Prior, Strategy::Param, Strategy::Apriori,
                     Strategy::Linear, Strategy::HOnly})
  {
    EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  }
}

TEST(Adapt, HistoryColumnsAndDeterminism)
{
  AdaptConfig cfg;
  cfg.max_iter = 3;
  const Problem pr = smooth_problem();
  const AdaptHistory a = run_adaptive(pr, cfg), b = run_adaptive(pr, cfg);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());

  std::istringstream in(sa.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 20);
  ASSERT_EQ(a.rows.size(), 4u);
  for (std::size_t l = 0; l + 1 < a.rows.size(); ++l)
  {
    const auto &r = a.rows[l];
    EXPECT_LT(r.dofs, a.rows[l + 1].dofs);
    EXPECT_GE(r.eta, r.error);
    EXPECT_GE(r.theta_achieved, 0.5);
    EXPECT_LE(r.c_red_sharp, r.c_red);
    EXPECT_LE(r.c_red, 1.0);
    EXPECT_LE(a.rows[l + 1].error, r.c_red_sharp * r.error);
    EXPECT_GE(r.increment, r.eta_lower - 1e-9);
    EXPECT_FALSE(std::isnan(r.i_red));
  }
}

TEST(Smoothness, ThresholdRules)
{
  EXPECT_TRUE(param_prefers_h(0.31, 1.0, 3, 0.3));
  EXPECT_FALSE(param_prefers_h(0.31, 1.0, 3, 0.6));
  EXPECT_FALSE(param_prefers_h(0.9, 1.0, 1, 0.3));
  EXPECT_FALSE(param_prefers_h(0.9, 0.0, 3, 0.3));
  // s = 1 - log(0.5) / log(2) = 2 < p + 1.
  EXPECT_TRUE(prior_prefers_h(0.5, 1.0, 2));
  // p = 2, ratio 1/8: s = 4, so p = 2 < s - 1 = 3.
  EXPECT_FALSE(prior_prefers_h(0.125, 1.0, 2));
  EXPECT_FALSE(prior_prefers_h(0.5, 1.0, 1));
}

TEST(Smoothness, LowerDegreeErrorVanishesOnLowerDegreeFunctions)
{
  auto mesh = std::make_shared<const Mesh>(build_initial_mesh(DomainShape::Square, 0.5));
  auto space = std::make_shared<const HpSpace>(mesh, DegreeVector(mesh->num_triangles(), 3));
  const FeFunction quad(space, interpolate(*space, [](int, const Point &x) {
                          return x.x() * x.x() - 2 * x.x() * x.y() + 0.5;
                        }));
  const FeFunction cubic(space, interpolate(*space, [](int, const Point &x) {
                           return x.x() * x.x() * x.y() + x.y() * x.y() * x.y();
                         }));
  for (int k = 0; k < mesh->num_triangles(); k += 5)
  {
    EXPECT_LT(lower_degree_error(quad, k), 1e-11);
    EXPECT_GT(lower_degree_error(cubic, k), 1e-4);
  }
}

TEST(Linear, CornerRefinesGeometricallyWithLayeredDegrees)
{
  AdaptConfig cfg;
  cfg.strategy = Strategy::Linear;
  cfg.max_iter = 4;
  std::vector<double> corner_h;
  std::vector<int> max_p;
  bool corner_linear = true;
  run_adaptive(lshape_problem(), cfg, [&](const IterationRecord &, const HpSpace &space) {
    const Mesh &m = space.mesh();
    double h = 0.0;
    for (int k = 0; k < m.num_triangles(); ++k)
    {
      for (int a : m.cell(k).vertices)
      {
        if (m.vertex(a).norm() < 1e-14)
        {
          h = std::max(h, m.diameter(k));
          corner_linear = corner_linear && space.degree(k) == 1;
        }
      }
    }
    corner_h.push_back(h);
    max_p.push_back(space.max_degree());
  });
  ASSERT_EQ(corner_h.size(), 5u);
  EXPECT_NEAR(corner_h[0], 0.5, 1e-14);
  for (std::size_t l = 1; l < corner_h.size(); ++l)
  {
    EXPECT_NEAR(corner_h[l], 0.5 * corner_h[l - 1], 1e-14);
    EXPECT_GE(max_p[l], max_p[l - 1]);
  }
  EXPECT_TRUE(corner_linear);
  // Farthest triangles after four halvings sit in layer 1 + ceil(log2(1.4 / 2^-5)) <= 7.
  EXPECT_GE(max_p.back(), 2);
  EXPECT_LE(max_p.back(), 3);
}

TEST(ExponentialFit, RecoversSyntheticConstants)
{
  std::vector<double> dofs, err;
  for (int n : {50, 120, 300, 800, 2000})
  {
    dofs.push_back(n);
    err.push_back(2.0 * std::exp(-0.5 * std::cbrt(static_cast<double>(n))));
  }
  const ExponentialFit fit = fit_exponential(dofs, err);
  EXPECT_NEAR(fit.c1, 2.0, 1e-10);
  EXPECT_NEAR(fit.c2, 0.5, 1e-10);
  EXPECT_THROW(fit_exponential(std::vector<double>{10, 10, 10}, std::vector<double>{1, 0.5, 0.2}),
               std::invalid_argument);
  EXPECT_THROW(fit_exponential(std::vector<double>{10, 20}, std::vector<double>{1, 0.5}),
               std::invalid_argument);
}
