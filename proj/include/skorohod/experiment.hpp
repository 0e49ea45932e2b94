#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "skorohod/chaos.hpp"
#include "skorohod/integrator.hpp"

namespace skorohod::experiment {

struct ConstantResult {
  /// int_0^1 E[(L f)(s)^2] ds
  double drift_energy = 0.0;
  /// sqrt(drift_energy / 12)
  double C = 0.0;
};

/// Rate constant of the error, integrated with composite Gauss-Legendre on
/// segments split at every tau and coefficient breakpoint.
ConstantResult constant_C(const chaos::ChaosExpansion& u);

struct Fn2Result {
  double x1 = 0.0;  // bridge-bridge covariance against E[Lf(s) Lf(s')]
  double x2 = 0.0;  // bridge-W covariances against the x-derivatives of Lf
  double total() const { return x1 + x2; }
};

/// Leading-order mean squared error sum_i E[(int_cell_i B_s <> Lf(s) ds)^2],
/// exact up to per-cell Gauss-Legendre quadrature of the given order. Every
/// tau must be a coarse knot; otherwise UnsupportedError.
Fn2Result analytic_fn2(const chaos::ChaosExpansion& u, int n, int order = 8);

/// E[(I - E[I | knots])^2] for the exact (continuous-time) integral, with the
/// knots being the coarse grid plus the taus.
double analytic_en2(const chaos::ChaosExpansion& u, int n, int order = 10);

struct McResult {
  std::int64_t paths = 0;
  double e2_hat = 0.0;      // mean of the squared errors
  double e2_stderr = 0.0;   // standard error of e2_hat
  double e_hat = 0.0;       // sqrt(e2_hat)
  double e_stderr = 0.0;    // delta method: e2_stderr / (2 e_hat)
};

/// Monte Carlo estimate of e_n. Path i uses the stream (seed, n, i), and the
/// per-path squared errors are reduced in index order, so the result does not
/// depend on `workers`.
McResult mc_error(const chaos::ChaosExpansion& u, const integrator::EvaluationPlan& plan, std::int64_t paths,
                  std::uint64_t seed, int workers = 1);

struct OracleResult {
  double rms_gap = 0.0;           // sqrt(mean (inner average - closed form)^2)
  double inner_noise = 0.0;       // sqrt(mean inner variance / inner paths)
  double excess = 0.0;            // mean of gap^2 - inner variance / inner paths
  double excess_stderr = 0.0;
  double z = 0.0;                 // excess / excess_stderr
};

/// Brute-force check of the closed-form conditional expectation: for every
/// outer path, the Brownian path is resampled `inner` times between the knots
/// and the sample mean of I is compared with the closed form. Cost is
/// outer * inner integral evaluations on a grid of fine_factor * n cells.
OracleResult nested_mc_oracle(const chaos::ChaosExpansion& u, int n, std::int64_t outer, std::int64_t inner,
                              std::uint64_t seed, int fine_factor = 16, int workers = 1);

struct RateStudyConfig {
  std::vector<int> n_list;
  std::int64_t paths = 100000;
  std::uint64_t seed = 1;
  int fine_factor = 64;
  integrator::Quadrature quadrature = integrator::Quadrature::Trapezoid;
  int workers = 1;
};

struct ErrorRow {
  int n = 0;
  McResult mc;
  double n_times_e = 0.0;
  double f_n = std::numeric_limits<double>::quiet_NaN();
  double slope_running = std::numeric_limits<double>::quiet_NaN();
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  double C = std::numeric_limits<double>::quiet_NaN();
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool slope_fitted = false;
};

/// Below this every e_n estimate counts as exact and no slope is fitted.
inline constexpr double kExactThreshold = 1e-10;

ErrorReport rate_study(const chaos::ChaosExpansion& u, const RateStudyConfig& cfg);

/// Least-squares slope of log y against log x; NaN with fewer than two points.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_csv(const ErrorReport& report, std::ostream& out);

}  // namespace skorohod::experiment
