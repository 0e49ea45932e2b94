#include "skorohod/gaussian.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "skorohod/errors.hpp"

namespace skorohod::gaussian {

TimePoint::TimePoint(double t) : t_(t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("time " + std::to_string(t) + " is outside [0,1]");
  }
}

namespace {

std::atomic<double> g_cov_lin_fault{0.0};

void require_positive(int n) {
  if (n < 1) throw DomainError("grid resolution n must be positive, got " + std::to_string(n));
}

}  // namespace

int cell_index(double s, int n) {
  require_positive(n);
  int c = static_cast<int>(std::floor(s * n));
  // s*n can round across an integer when s was built as i/n.
  if (c + 1 <= n && static_cast<double>(c + 1) / n <= s) ++c;
  if (c > 0 && static_cast<double>(c) / n > s) --c;
  return std::clamp(c, 0, n - 1);
}

namespace testing {

void set_cov_lin_fault(double offset) { g_cov_lin_fault.store(offset); }
double cov_lin_fault() { return g_cov_lin_fault.load(); }

}  // namespace testing

double cov_brownian(TimePoint s, TimePoint t) { return std::min(s.value(), t.value()); }

double cov_lin(TimePoint s, TimePoint t, int n) {
  require_positive(n);
  const double sv = s.value();
  const double tv = t.value();
  const int cs = cell_index(sv, n);
  const int ct = cell_index(tv, n);
  if (cs != ct) return std::min(sv, tv);
  const double left = static_cast<double>(ct) / n;
  // ordered product keeps the kernel exactly symmetric
  const double lo = std::min(sv, tv) - left;
  const double hi = std::max(sv, tv) - left;
  return left + n * lo * hi + g_cov_lin_fault.load(std::memory_order_relaxed);
}

double cov_bridge_bridge(TimePoint s, TimePoint t, int n) {
  require_positive(n);
  const double sv = s.value();
  const double tv = t.value();
  const int cs = cell_index(sv, n);
  const int ct = cell_index(tv, n);
  if (cs != ct) return 0.0;
  const double left = static_cast<double>(ct) / n;
  const double lo = std::min(sv, tv) - left;
  const double hi = std::max(sv, tv) - left;
  return std::min(sv, tv) - left - lo * hi * n;
}

double cov_bridge_w(TimePoint s, TimePoint t, int n) { return cov_bridge_bridge(s, t, n); }

double cov_bridge_lin(TimePoint /*s*/, TimePoint /*t*/, int n) {
  require_positive(n);
  return 0.0;
}

double bridge_double_integral(int i, int j, int n) {
  require_positive(n);
  if (i < 1 || i > n || j < 1 || j > n) {
    throw DomainError("cell index out of range 1.." + std::to_string(n));
  }
  if (i != j) return 0.0;
  const double nd = n;
  return 1.0 / (12.0 * nd * nd * nd);
}

// ---------------------------------------------------------------------------

KnotSet KnotSet::equidistant(int n, std::span<const double> extra) {
  require_positive(n);
  KnotSet ks;
  ks.n_ = n;
  ks.knots_.reserve(static_cast<std::size_t>(n) + 1 + extra.size());
  for (int i = 0; i <= n; ++i) ks.knots_.push_back(static_cast<double>(i) / n);
  for (double e : extra) {
    TimePoint checked(e);
    ks.knots_.push_back(checked.value());
  }
  std::sort(ks.knots_.begin(), ks.knots_.end());
  ks.knots_.erase(std::unique(ks.knots_.begin(), ks.knots_.end(),
                              [](double a, double b) { return std::abs(a - b) <= 1e-14; }),
                  ks.knots_.end());
  return ks;
}

bool KnotSet::on_coarse_grid(double s) const {
  const double scaled = s * n_;
  return std::abs(scaled - std::round(scaled)) <= 1e-12 * std::max(1.0, scaled);
}

bool KnotSet::is_knot(double s) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), s - 1e-14);
  return it != knots_.end() && std::abs(*it - s) <= 1e-14;
}

std::size_t KnotSet::cell(double s) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t c = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(c, knots_.size() - 2);
}

double KnotSet::cov_lin(double s, double t) const {
  const std::size_t cs = cell(s);
  const std::size_t ct = cell(t);
  if (cs != ct) return std::min(s, t);
  const double a = knots_[cs];
  const double b = knots_[cs + 1];
  return a + (s - a) * (t - a) / (b - a) + g_cov_lin_fault.load(std::memory_order_relaxed);
}

double KnotSet::cov_bridge(double s, double t) const {
  const std::size_t cs = cell(s);
  const std::size_t ct = cell(t);
  if (cs != ct) return 0.0;
  const double a = knots_[cs];
  const double b = knots_[cs + 1];
  return std::min(s, t) - a - (s - a) * (t - a) / (b - a);
}

// ---------------------------------------------------------------------------

void check_psd(const Eigen::MatrixXd& cov, double tol) {
  if (cov.rows() != cov.cols()) throw ConsistencyError("covariance matrix is not square");
  if (cov.rows() == 0) return;
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConsistencyError("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues().minCoeff();
  if (smallest < -tol) {
    throw ConsistencyError("covariance matrix is not positive semidefinite (smallest eigenvalue " +
                           std::to_string(smallest) + ")");
  }
}

namespace {

double pair_cov(const Point& a, const Point& b, int n) {
  using enum Family;
  const TimePoint s = a.time;
  const TimePoint t = b.time;
  if (a.family == W && b.family == W) return cov_brownian(s, t);
  if (a.family == Bridge && b.family == Bridge) return cov_bridge_bridge(s, t, n);
  if (a.family == Bridge || b.family == Bridge) {
    const Family other = a.family == Bridge ? b.family : a.family;
    return other == W ? cov_bridge_w(s, t, n) : cov_bridge_lin(s, t, n);
  }
  // W with Wlin, or Wlin with Wlin: both equal the interpolation covariance.
  return cov_lin(s, t, n);
}

}  // namespace

GaussianVector build_gaussian_vector(std::span<const Point> points, std::optional<int> n) {
  const bool needs_n =
      std::any_of(points.begin(), points.end(), [](const Point& p) { return p.family != Family::W; });
  if (needs_n && !n) throw DomainError("grid resolution n is required for Wlin/Bridge variables");
  const int grid = n.value_or(1);

  GaussianVector gv;
  gv.points.assign(points.begin(), points.end());
  const auto d = static_cast<Eigen::Index>(points.size());
  gv.cov.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = pair_cov(gv.points[static_cast<std::size_t>(i)], gv.points[static_cast<std::size_t>(j)], grid);
      gv.cov(i, j) = c;
      gv.cov(j, i) = c;
    }
  }
  check_psd(gv.cov);
  return gv;
}

GaussianVector brownian_vector(std::span<const double> times) {
  std::vector<Point> pts;
  pts.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    pts.push_back(Point{TimePoint(times[i]), Family::W, i == 0 ? Role::Dynamic : Role::Frozen});
  }
  return build_gaussian_vector(pts);
}

}  // namespace skorohod::gaussian
