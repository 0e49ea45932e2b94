#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace skorohod::gaussian {

/// A time in [0,1]. Construction validates the range.
class TimePoint {
 public:
  explicit TimePoint(double t);
  double value() const { return t_; }

 private:
  double t_;
};

/// Index of the coarse cell containing s on the grid {i/n}; cells are
/// left-closed, and s = 1 belongs to the last cell (index n-1).
int cell_index(double s, int n);

// Closed-form covariance kernels on [0,1]. W is Brownian motion, W^lin its
// piecewise-linear interpolation at {i/n}, and B^n = W - W^lin the bridge.
double cov_brownian(TimePoint s, TimePoint t);
double cov_lin(TimePoint s, TimePoint t, int n);
double cov_bridge_bridge(TimePoint s, TimePoint t, int n);
double cov_bridge_w(TimePoint s, TimePoint t, int n);
/// E[B^n_s W^lin_t]; identically zero.
double cov_bridge_lin(TimePoint s, TimePoint t, int n);

/// Integral of E[B^n_s B^n_t] over cell i (in s) times cell j (in t), with
/// 1-based cell indices: 1{i=j} / (12 n^3).
double bridge_double_integral(int i, int j, int n);

/// Observation knots 0 = k_0 < ... < k_m = 1: the coarse grid {i/n} refined by
/// any extra conditioning times. Provides the interpolation kernels for an
/// arbitrary knot set.
class KnotSet {
 public:
  static KnotSet equidistant(int n, std::span<const double> extra = {});

  std::span<const double> knots() const { return knots_; }
  int coarse_n() const { return n_; }
  bool on_coarse_grid(double s) const;
  bool is_knot(double s) const;

  /// Index c such that knots[c] <= s < knots[c+1] (the last cell is closed).
  std::size_t cell(double s) const;
  double cov_lin(double s, double t) const;
  double cov_bridge(double s, double t) const;

 private:
  std::vector<double> knots_;
  int n_ = 1;
};

enum class Family { W, Wlin, Bridge };
enum class Role { Dynamic, Frozen, Terminal };

struct Point {
  TimePoint time;
  Family family = Family::W;
  Role role = Role::Frozen;
};

struct GaussianVector {
  std::vector<Point> points;
  Eigen::MatrixXd cov;

  std::size_t dim() const { return points.size(); }
  double variance(std::size_t i) const { return cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)); }
};

/// Throws ConsistencyError if the smallest eigenvalue is below -tol or the
/// matrix is not symmetric.
void check_psd(const Eigen::MatrixXd& cov, double tol = 1e-10);

/// Fills the joint covariance of the requested variables. `n` is required as
/// soon as any point is not a plain W.
GaussianVector build_gaussian_vector(std::span<const Point> points, std::optional<int> n = std::nullopt);

/// Covariance of (W_{t_1}, ..., W_{t_K}).
GaussianVector brownian_vector(std::span<const double> times);

namespace testing {

/// Mutation hook for the self-validation suite: adds `offset` to every
/// same-cell value of the interpolation covariance. 0 restores the kernel.
void set_cov_lin_fault(double offset);
double cov_lin_fault();

}  // namespace testing

}  // namespace skorohod::gaussian
