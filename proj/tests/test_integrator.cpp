#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "skorohod/chaos.hpp"
#include "skorohod/checks.hpp"
#include "skorohod/errors.hpp"
#include "skorohod/integrator.hpp"
#include "skorohod/sampling.hpp"
#include "stats.hpp"

using namespace skorohod;
using chaos::ChaosExpansion;
using chaos::Coefficient;
using integrator::BrownianPath;
using integrator::EvaluationPlan;

namespace {

const Coefficient kS = Coefficient::polynomial({0.0, 1.0});
const Coefficient kOne = Coefficient::constant(1.0);

BrownianPath sample(const EvaluationPlan& plan, std::span<const double> taus, sampling::Rng& rng) {
  BrownianPath p;
  p.grid = integrator::fine_grid(plan.n, plan.fine_factor, taus);
  p.values.resize(p.grid.size());
  sampling::PathSampler(p.grid).sample(rng, p.values);
  return p;
}

double trapezoid(const BrownianPath& p, const std::function<double(double, double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.grid.size(); ++i) {
    acc += 0.5 * (p.grid[i + 1] - p.grid[i]) * (f(p.grid[i], p.values[i]) + f(p.grid[i + 1], p.values[i + 1]));
  }
  return acc;
}

}  // namespace

TEST(FineGrid, ContainsKnotsAndTaus) {
  const auto g = integrator::fine_grid(3, 4, std::vector<double>{0.1, 2.0 / 3.0, 0.5 + 1e-15});
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  for (int i = 0; i <= 3; ++i) EXPECT_NO_THROW(integrator::grid_index(g, static_cast<double>(i) / 3));
  EXPECT_NO_THROW(integrator::grid_index(g, 0.1));
  EXPECT_NO_THROW(integrator::grid_index(g, 0.5));
  EXPECT_EQ(g.size(), 13u + 1u);  // 12 cells + the inserted 0.1; 0.5 and 2/3 exist already
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
  EXPECT_THROW(integrator::grid_index(g, 0.11), DomainError);
}

TEST(Plan, Validation) {
  EXPECT_THROW((EvaluationPlan{0, 8}).validate(), DomainError);
  EXPECT_THROW((EvaluationPlan{4, 1}).validate(), DomainError);
  EXPECT_NO_THROW((EvaluationPlan{4, 2}).validate());
}

TEST(QuadratureWeights, ExactOnPolynomials) {
  const auto g = integrator::fine_grid(2, 6, std::vector<double>{0.3});
  auto integral = [&](integrator::Quadrature q, auto f) {
    const auto w = integrator::quadrature_weights(g, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += w[i] * f(g[i]);
    return acc;
  };
  EXPECT_NEAR(integral(integrator::Quadrature::Trapezoid, [](double) { return 1.0; }), 1.0, 1e-15);
  EXPECT_NEAR(integral(integrator::Quadrature::Trapezoid, [](double s) { return s; }), 0.5, 1e-15);
  EXPECT_NEAR(integral(integrator::Quadrature::Simpson, [](double s) { return s * s; }), 1.0 / 3.0, 1e-4);
  // leftover trapezoid cells keep Simpson from being exact; the pairs are
  const auto even = integrator::fine_grid(1, 8, {});
  const auto w = integrator::quadrature_weights(even, integrator::Quadrature::Simpson);
  double acc = 0.0;
  for (std::size_t i = 0; i < even.size(); ++i) acc += w[i] * std::pow(even[i], 3);
  EXPECT_NEAR(acc, 0.25, 1e-15);
}

TEST(Skorohod, Examples) {
  auto rng = sampling::stream_rng(1, 0, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const EvaluationPlan plan{4, 8};
    const auto p = sample(plan, {}, rng);
    const double w1 = p.values.back();
    EXPECT_NEAR(integrator::skorohod_pathwise(ChaosExpansion(1, {}, {{kOne, {0}}}), p, plan), w1, 1e-14);
    EXPECT_NEAR(integrator::skorohod_pathwise(ChaosExpansion(1, {}, {{kOne, {1}}}), p, plan), (w1 * w1 - 1) / 2, 1e-14);
    EXPECT_NEAR(integrator::conditional_pathwise(ChaosExpansion(1, {}, {{kOne, {0}}}), p, plan), w1, 1e-14);
    // u = s: I = W_1 - int W ds, by the same trapezoid
    const auto lin = ChaosExpansion(1, {}, {{kS, {0}}});
    EXPECT_NEAR(integrator::skorohod_pathwise(lin, p, plan), w1 - trapezoid(p, [](double, double w) { return w; }), 1e-14);

    const std::vector<double> one{1.0};
    const auto p1 = sample(plan, one, rng);
    const double v1 = p1.values.back();
    const ChaosExpansion wt(2, {1.0}, {{kOne, {0, 1}}});
    EXPECT_NEAR(integrator::skorohod_pathwise(wt, p1, plan), v1 * v1 - 1, 1e-14);
    EXPECT_NEAR(integrator::conditional_pathwise(wt, p1, plan), v1 * v1 - 1, 1e-14);
    EXPECT_LE(integrator::error_sample(wt, p1, plan), 1e-20);
  }
}

TEST(Conditional, LinearDriftOnOneCell) {
  auto rng = sampling::stream_rng(2, 0, 0);
  const auto u = ChaosExpansion(1, {}, {{kS, {0}}});
  for (auto q : {integrator::Quadrature::Trapezoid, integrator::Quadrature::Simpson}) {
    const EvaluationPlan plan{1, 16, q};
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = sample(plan, {}, rng);
      const double w1 = p.values.back();
      EXPECT_NEAR(integrator::conditional_pathwise(u, p, plan), w1 / 2, 1e-14);
    }
  }
  const EvaluationPlan plan{1, 16};
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = sample(plan, {}, rng);
    const double w1 = p.values.back();
    const double bridge = trapezoid(p, [&](double s, double w) { return w - s * w1; });
    EXPECT_NEAR(integrator::error_sample(u, p, plan), bridge * bridge, 1e-14);
    EXPECT_GT(integrator::error_sample(u, p, plan), 0.0);
    EXPECT_EQ(integrator::error_sample(ChaosExpansion::zero(1, {}), p, plan), 0.0);
  }
}

TEST(Skorohod, GridMismatch) {
  const EvaluationPlan plan{4, 8};
  auto rng = sampling::stream_rng(3, 0, 0);
  const auto p = sample(EvaluationPlan{4, 4}, {}, rng);
  EXPECT_THROW(integrator::skorohod_pathwise(ChaosExpansion(1, {}, {{kS, {0}}}), p, plan), DomainError);
}

TEST(Prepared, ErrorIsDifferenceOfValues) {
  sampling::Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> taus{trial % 2 ? 0.5 : 0.3};
    const auto u = checks::random_expansion(rng, 2, taus, 5, 3);
    const EvaluationPlan plan{2, 8};
    const integrator::PreparedIntegrand prep(u, plan);
    auto ws = prep.make_workspace();
    const auto p = sample(plan, taus, rng);
    const auto v = prep.evaluate(p.values, ws);
    EXPECT_NEAR(prep.error(p.values, ws), v.skorohod - v.conditional, 1e-11 * std::max(1.0, std::abs(v.skorohod)));
    EXPECT_NEAR(prep.skorohod(p.values, ws), v.skorohod, 1e-12 * std::max(1.0, std::abs(v.skorohod)));
    EXPECT_NEAR(integrator::skorohod_pathwise(u, p, plan), v.skorohod, 1e-12 * std::max(1.0, std::abs(v.skorohod)));
  }
}

TEST(STransform, DefiningIdentity) {
  sampling::Rng rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = checks::random_expansion(rng, 3, {unif(rng), unif(rng)}, 4, 3);
    for (int j = 0; j < 5; ++j) {
      const auto g = checks::random_step_function(rng);
      EXPECT_NEAR(integrator::skorohod_s_transform(u, g), integrator::s_transform_integral(u, g), 1e-9);
    }
  }
  // I[1] = W_1 has S-transform int g
  const chaos::StepFunction g({0.0, 0.4, 1.0}, {2.0, -1.0});
  EXPECT_NEAR(integrator::skorohod_s_transform(ChaosExpansion(1, {}, {{kOne, {0}}}), g), 0.8 - 0.6, 1e-15);
}

TEST(Ito, PathwiseIdentity) {
  sampling::Rng rng(8);
  const EvaluationPlan plan{4, 16};
  const double h = 1.0 / (plan.n * plan.fine_factor);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = checks::random_expansion(rng, 2, {0.75}, 6, 3);
    for (int p = 0; p < 5; ++p) {
      const auto path = sample(plan, f.taus(), rng);
      const auto r = checks::ito_residual(f, path, plan);
      EXPECT_LE(std::abs(r.lhs - r.rhs), 10 * h * h * r.scale);
    }
  }
  // classical case W_1^2 = 2 int W dW + 1
  const ChaosExpansion sq(1, {}, {{kS, {0}}, {kOne, {2}}});
  const auto path = sample(plan, {}, rng);
  const auto r = checks::ito_residual(sq, path, plan);
  EXPECT_NEAR(r.lhs, path.values.back() * path.values.back(), 1e-14);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-13);
}

// Tower property and orthogonality of the error, for on- and off-grid taus.
TEST(Conditional, TowerAndOrthogonality) {
  const std::vector<ChaosExpansion> cases{
      ChaosExpansion(1, {}, {{kS, {0}}, {kOne, {2}}}),
      ChaosExpansion(2, {0.5}, {{kS, {0, 1}}}),
      ChaosExpansion(2, {0.3}, {{Coefficient::polynomial({1.0, -2.0, 1.5}), {1, 1}}, {kS, {2, 0}}}),
  };
  int idx = 0;
  for (const auto& u : cases) {
    const EvaluationPlan plan{2, 8};
    const integrator::PreparedIntegrand prep(u, plan);
    auto ws = prep.make_workspace();
    const sampling::PathSampler sampler(prep.grid());
    std::vector<double> diff, cross, w(prep.grid().size());
    for (int p = 0; p < 20000; ++p) {
      auto rng = sampling::stream_rng(10, static_cast<std::uint64_t>(idx), static_cast<std::uint64_t>(p));
      sampler.sample(rng, w);
      const auto v = prep.evaluate(w, ws);
      diff.push_back(v.skorohod - v.conditional);
      cross.push_back((v.skorohod - v.conditional) * v.conditional);
    }
    EXPECT_TRUE(testutil::within(testutil::mean_se(diff), 0.0, 5.0)) << "case " << idx;
    EXPECT_TRUE(testutil::within(testutil::mean_se(cross), 0.0, 5.0)) << "case " << idx;
    ++idx;
  }
}
