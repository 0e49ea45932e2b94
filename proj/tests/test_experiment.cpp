#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "skorohod/chaos.hpp"
#include "skorohod/errors.hpp"
#include "skorohod/experiment.hpp"
#include "skorohod/problem.hpp"
#include "skorohod/sampling.hpp"
#include "stats.hpp"

using namespace skorohod;
using chaos::ChaosExpansion;
using chaos::Coefficient;
using experiment::RateStudyConfig;
using integrator::EvaluationPlan;

namespace {

const Coefficient kS = Coefficient::polynomial({0.0, 1.0});
const Coefficient kOne = Coefficient::constant(1.0);
const double kInvSqrt12 = 1.0 / std::sqrt(12.0);

ChaosExpansion builtin(const char* name) { return problem::builtin(name).expansion; }

}  // namespace

TEST(SamplePath, MomentsAndDeterminism) {
  const auto grid = integrator::fine_grid(4, 4, {});
  const sampling::PathSampler sampler(grid);
  const auto i25 = integrator::grid_index(grid, 0.25);
  const auto i75 = integrator::grid_index(grid, 0.75);
  std::vector<double> w(grid.size()), var1, cov;
  for (int p = 0; p < 100000; ++p) {
    auto rng = sampling::stream_rng(1, 0, static_cast<std::uint64_t>(p));
    sampler.sample(rng, w);
    EXPECT_EQ(w[0], 0.0);
    var1.push_back(w.back() * w.back());
    cov.push_back(w[i25] * w[i75]);
  }
  EXPECT_TRUE(testutil::within(testutil::mean_se(var1), 1.0, 5.0));
  EXPECT_TRUE(testutil::within(testutil::mean_se(cov), 0.25, 5.0));

  std::vector<double> a(grid.size()), b(grid.size());
  auto r1 = sampling::stream_rng(42, 3, 17);
  auto r2 = sampling::stream_rng(42, 3, 17);
  sampler.sample(r1, a);
  sampler.sample(r2, b);
  EXPECT_EQ(a, b);
  auto r3 = sampling::stream_rng(42, 3, 18);
  sampler.sample(r3, b);
  EXPECT_NE(a, b);
}

TEST(BridgeSampler, KeepsKnotsAndMatchesBridgeVariance) {
  const auto grid = integrator::fine_grid(2, 8, {});
  const std::vector<std::size_t> knots{0, 8, 16};
  const sampling::BridgeSampler bridge(grid, knots);
  std::vector<double> w(grid.size(), 0.0);
  w[8] = 0.7;
  w[16] = -0.2;
  std::vector<double> mid;
  auto rng = sampling::stream_rng(3, 0, 0);
  for (int i = 0; i < 100000; ++i) {
    bridge.resample(rng, w);
    ASSERT_EQ(w[8], 0.7);
    ASSERT_EQ(w[16], -0.2);
    mid.push_back(w[4]);
  }
  const auto m = testutil::mean_se(mid);
  EXPECT_TRUE(testutil::within(m, 0.35, 5.0));
  std::vector<double> dev;
  for (double x : mid) dev.push_back((x - 0.35) * (x - 0.35));
  EXPECT_TRUE(testutil::within(testutil::mean_se(dev), 0.125, 5.0));  // (1/4)(1/4)/(1/2)
}

TEST(ConstantC, Examples) {
  EXPECT_NEAR(experiment::constant_C(builtin("square")).C, kInvSqrt12, 1e-12);
  EXPECT_NEAR(experiment::constant_C(builtin("square")).drift_energy, 1.0, 1e-12);
  EXPECT_EQ(experiment::constant_C(builtin("wick_square_terminal")).C, 0.0);
  EXPECT_NEAR(experiment::constant_C(builtin("tau_linear")).C, std::sqrt(1.0 / 24.0), 1e-12);
  EXPECT_EQ(experiment::constant_C(ChaosExpansion::zero(1, {})).C, 0.0);
}

TEST(AnalyticFn2, Examples) {
  const auto lin = builtin("linear_drift");
  for (int n : {1, 2, 3, 4, 8, 16, 32, 64}) {
    const auto r = experiment::analytic_fn2(lin, n);
    EXPECT_NEAR(r.x1, 1.0 / (12.0 * n * n), 1e-14 / (n * n));
    EXPECT_EQ(r.x2, 0.0);
  }
  EXPECT_EQ(experiment::analytic_fn2(builtin("wick_square_terminal"), 4).total(), 0.0);
  EXPECT_NEAR(experiment::analytic_fn2(builtin("square"), 4).total(), 1.0 / 192.0, 1e-16);
  EXPECT_NEAR(experiment::analytic_fn2(builtin("tau_linear"), 4).total(), 1.0 / (24.0 * 16.0), 1e-16);
  EXPECT_THROW(experiment::analytic_fn2(builtin("tau_linear"), 3), UnsupportedError);
}

TEST(AnalyticFn2, QuadratureOrderSelfCheck) {
  for (const char* name : {"sine", "tau_linear", "square"}) {
    const auto u = builtin(name);
    for (int n : {2, 4, 8}) {
      const double a = experiment::analytic_fn2(u, n, 8).total();
      const double b = experiment::analytic_fn2(u, n, 16).total();
      EXPECT_LE(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(b))) << name << " n=" << n;
    }
  }
  const ChaosExpansion quad(1, {}, {{Coefficient::polynomial({0.0, 0.0, 1.0}), {2}}});
  EXPECT_LE(std::abs(experiment::analytic_en2(quad, 4, 10) - experiment::analytic_en2(quad, 4, 20)), 1e-14);
}

// The leading term is 1/(12 n^2) * int E[(Lf)^2] asymptotically.
TEST(AnalyticFn2, ApproachesTheConstant) {
  for (const auto& name : problem::builtin_names()) {
    const auto u = builtin(name.c_str());
    const double c = experiment::constant_C(u).C;
    const double fn = std::sqrt(experiment::analytic_fn2(u, 64).total());
    if (c == 0.0) {
      EXPECT_EQ(fn, 0.0) << name;
    } else {
      EXPECT_LE(std::abs(64 * fn - c) / c, 0.02) << name;
    }
  }
}

TEST(AnalyticEn2, ExactFiniteN) {
  for (int n : {1, 2, 4, 8}) {
    EXPECT_NEAR(experiment::analytic_en2(builtin("linear_drift"), n) * 12.0 * n * n, 1.0, 1e-13);
    EXPECT_NEAR(experiment::analytic_en2(builtin("square"), n) * 12.0 * n * n, 1.0, 1e-13);
  }
  for (int n : {2, 4}) EXPECT_NEAR(experiment::analytic_en2(builtin("tau_linear"), n) * 24.0 * n * n, 1.0, 1e-13);
  EXPECT_EQ(experiment::analytic_en2(builtin("wick_square_terminal"), 4), 0.0);
}

TEST(AnalyticEn2, MatchesMonteCarlo) {
  const std::vector<ChaosExpansion> cases{
      ChaosExpansion(1, {}, {{kS, {2}}}),
      ChaosExpansion(2, {0.3}, {{Coefficient::polynomial({0.5, -1.0, 2.0}), {1, 1}}, {kS, {0, 2}}}),
      builtin("sine"),
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const int n = 4;
    const auto mc = experiment::mc_error(cases[i], {n, 32}, 20000, 7 + i);
    const double exact = experiment::analytic_en2(cases[i], n);
    EXPECT_LE(std::abs(mc.e2_hat - exact), 5 * mc.e2_stderr) << "case " << i << ": " << mc.e2_hat << " vs " << exact;
  }
}

TEST(McError, Examples) {
  const auto r = experiment::mc_error(builtin("linear_drift"), {4, 64}, 100000, 1);
  EXPECT_LE(std::abs(r.e_hat - kInvSqrt12 / 4), 5 * r.e_stderr);
  EXPECT_GT(r.e_stderr, 0.0);
  const auto w = experiment::mc_error(builtin("wick_square_terminal"), {4, 64}, 1000, 1);
  EXPECT_LE(w.e_hat, 1e-12);
  const auto z = experiment::mc_error(ChaosExpansion::zero(1, {}), {4, 64}, 1000, 1);
  EXPECT_EQ(z.e_hat, 0.0);
  EXPECT_EQ(z.e_stderr, 0.0);
  EXPECT_THROW(experiment::mc_error(builtin("square"), {4, 64}, 0, 1), DomainError);
}

TEST(McError, IndependentOfWorkerCount) {
  const auto u = builtin("tau_linear");
  const auto a = experiment::mc_error(u, {4, 16}, 3001, 99, 1);
  for (int workers : {2, 3, 8}) {
    const auto b = experiment::mc_error(u, {4, 16}, 3001, 99, workers);
    EXPECT_EQ(a.e2_hat, b.e2_hat);
    EXPECT_EQ(a.e2_stderr, b.e2_stderr);
  }
}

TEST(McError, ConsistencyChain) {
  // |e2_hat - fn2| <= 5 SE + c n^{-5/2}, with c fitted at the coarsest n and
  // reused for the finer ones
  const std::vector<ChaosExpansion> cases{
      ChaosExpansion(1, {}, {{kS, {2}}}),
      ChaosExpansion(2, {0.5}, {{Coefficient::polynomial({0.0, 0.0, 1.0}), {1, 1}}}),
      builtin("sine"),
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    double c = 0.0;
    for (int n : {4, 8, 16}) {
      const auto mc = experiment::mc_error(cases[i], {n, 32}, 20000, 3);
      const double fn2 = experiment::analytic_fn2(cases[i], n).total();
      const double excess = std::max(0.0, std::abs(mc.e2_hat - fn2) - 5 * mc.e2_stderr);
      if (n == 4) {
        c = excess * std::pow(4.0, 2.5);
      } else {
        EXPECT_LE(excess, c * std::pow(n, -2.5) * (1 + 1e-9)) << "case " << i << " n=" << n;
      }
    }
  }
}

TEST(McError, MonotoneInformation) {
  const auto u = builtin("square");
  double prev = 0.0;
  double prev_se = 0.0;
  for (int n : {2, 4, 8, 16}) {
    const auto r = experiment::mc_error(u, {n, 16}, 20000, 5);
    if (n > 2) EXPECT_LE(r.e_hat, prev + 5 * std::hypot(r.e_stderr, prev_se));
    prev = r.e_hat;
    prev_se = r.e_stderr;
  }
}

TEST(McError, FineFactorBiasWithinNoise) {
  const auto u = builtin("square");
  const auto ref = experiment::mc_error(u, {4, 64}, 20000, 11);
  for (int r : {16, 256}) {
    const auto m = experiment::mc_error(u, {4, r}, 20000, 11);
    EXPECT_LE(std::abs(m.e_hat - ref.e_hat), 5 * std::hypot(m.e_stderr, ref.e_stderr)) << "R=" << r;
  }
}

TEST(NestedOracle, ConfirmsClosedForm) {
  const auto r = experiment::nested_mc_oracle(builtin("linear_drift"), 2, 200, 500, 1);
  EXPECT_LE(std::abs(r.z), 5.0);
  EXPECT_GT(r.rms_gap, 0.0);
  const auto t = experiment::nested_mc_oracle(builtin("tau_linear"), 2, 200, 500, 2);
  EXPECT_LE(std::abs(t.z), 5.0);

  const auto w = experiment::nested_mc_oracle(builtin("wick_square_terminal"), 2, 50, 20, 1);
  EXPECT_LE(w.rms_gap, 1e-12);

  const auto one = experiment::nested_mc_oracle(builtin("linear_drift"), 2, 400, 1, 3);
  const auto many = experiment::nested_mc_oracle(builtin("linear_drift"), 2, 400, 100, 3);
  EXPECT_TRUE(std::isnan(one.z));
  const double ratio = one.rms_gap / many.rms_gap;
  EXPECT_GT(ratio, 7.0);
  EXPECT_LT(ratio, 14.0);
}

TEST(RateStudy, WickAnalyticSkipsSlope) {
  RateStudyConfig cfg;
  cfg.n_list = {4, 8, 16};
  cfg.paths = 200;
  cfg.fine_factor = 8;
  const auto r = experiment::rate_study(builtin("wick_square_terminal"), cfg);
  for (const auto& row : r.rows) EXPECT_LT(row.mc.e_hat, experiment::kExactThreshold);
  EXPECT_FALSE(r.slope_fitted);
  EXPECT_TRUE(std::isnan(r.slope));
  EXPECT_EQ(r.C, 0.0);
}

TEST(RateStudy, ConfigValidation) {
  RateStudyConfig cfg;
  cfg.n_list = {8, 4};
  cfg.paths = 200;
  EXPECT_THROW(experiment::rate_study(builtin("square"), cfg), DomainError);
  cfg.n_list = {4, 4};
  EXPECT_THROW(experiment::rate_study(builtin("square"), cfg), DomainError);
  cfg.n_list = {4, 8};
  cfg.paths = 99;
  EXPECT_THROW(experiment::rate_study(builtin("square"), cfg), DomainError);
}

TEST(RateStudy, CsvFormatAndReproducibility) {
  RateStudyConfig cfg;
  cfg.n_list = {2, 4, 8};
  cfg.paths = 2000;
  cfg.fine_factor = 8;
  cfg.workers = 1;
  const auto a = experiment::rate_study(builtin("linear_drift"), cfg);
  cfg.workers = 4;
  const auto b = experiment::rate_study(builtin("linear_drift"), cfg);
  std::ostringstream sa, sb;
  experiment::write_csv(a, sa);
  experiment::write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
  std::istringstream lines(sa.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(header, "n,paths,e_n_hat,e_n_stderr,n_times_e_n,C_analytic,f_n_analytic,slope_running");
  EXPECT_EQ(first.substr(0, 7), "2,2000,");
  EXPECT_NE(first.find(",nan"), std::string::npos);  // no running slope on the first row
  ASSERT_TRUE(a.slope_fitted);
  EXPECT_NEAR(a.rows[2].slope_running, a.slope, 0.0);
  for (const auto& row : a.rows) EXPECT_NEAR(row.f_n * row.n, kInvSqrt12, 1e-14);
}

TEST(LogLogSlope, PowerLaw) {
  EXPECT_NEAR(experiment::log_log_slope({1, 2, 4, 8}, {3, 1.5, 0.75, 0.375}), -1.0, 1e-14);
  EXPECT_NEAR(experiment::log_log_slope({2, 3}, {4, 9}), 2.0, 1e-14);
  EXPECT_TRUE(std::isnan(experiment::log_log_slope({2}, {4})));
}
