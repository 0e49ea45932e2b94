#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skorohod/chaos.hpp"
#include "skorohod/gaussian.hpp"
#include "skorohod/wick.hpp"

namespace skorohod::integrator {

enum class Quadrature { Trapezoid, Simpson };

struct EvaluationPlan {
  int n = 1;
  int fine_factor = 64;
  Quadrature quadrature = Quadrature::Trapezoid;

  void validate() const;
};

/// W sampled on a merged fine grid that contains every i/n and every tau.
struct BrownianPath {
  std::vector<double> grid;
  std::vector<double> values;
};

/// k/(R n) for k = 0..R n, with the taus inserted. A tau within 1e-13 of an
/// existing point is identified with it.
std::vector<double> fine_grid(int n, int fine_factor, std::span<const double> taus);

std::vector<double> quadrature_weights(std::span<const double> grid, Quadrature q);

/// Index of `t` in a fine grid; throws DomainError if it is not a grid point.
std::size_t grid_index(std::span<const double> grid, double t);

/// Everything about (u, plan) that does not depend on the path.
///
/// For a term a(s) W_s^{<>l} <> R with frozen factor R, integration by parts
/// gives the Skorohod integral
///   1/(l+1) [a(1) W_1^{<>(l+1)} <> R - int_0^1 a'(s) W_s^{<>(l+1)} <> R ds],
/// and conditioning on the knots (coarse grid plus taus) replaces W_s by its
/// interpolant inside the time integral only. The Wick monomials of
/// (W^lin_s, W_tau...) use the interpolated covariances.
class PreparedIntegrand {
 public:
  PreparedIntegrand(const chaos::ChaosExpansion& u, const EvaluationPlan& plan);

  struct Workspace {
    wick::WickTable table;
    std::vector<double> x;
  };

  struct Values {
    double skorohod = 0.0;
    double conditional = 0.0;
  };

  std::span<const double> grid() const { return grid_; }
  const gaussian::KnotSet& knots() const { return knots_; }
  /// Grid indices of the conditioning knots, ascending.
  std::span<const std::size_t> knot_indices() const { return knot_idx_; }
  const EvaluationPlan& plan() const { return plan_; }

  Workspace make_workspace() const;
  /// I and its conditional expectation for W given on grid().
  Values evaluate(std::span<const double> w, Workspace& ws) const;
  /// I only.
  double skorohod(std::span<const double> w, Workspace& ws) const;
  /// Only I - E[I | knots]; terminal factors cancel.
  double error(std::span<const double> w, Workspace& ws) const;

 private:
  double terminal(std::span<const double> w, Workspace& ws) const;
  void load_frozen(std::span<const double> w, Workspace& ws) const;
  double drift_at(std::size_t j, std::span<const double> cov, double x0, Workspace& ws) const;

  EvaluationPlan plan_;
  int slots_ = 1;
  std::vector<double> grid_;
  gaussian::KnotSet knots_;
  std::vector<std::size_t> knot_idx_;
  std::vector<std::size_t> tau_idx_;

  std::vector<int> box_;
  int max_total_ = 0;

  // terminal terms: a(1)/(l+1) at lifted offset
  std::vector<std::size_t> term_offsets_;
  std::vector<double> term_coeffs_;
  std::vector<double> cov_one_;

  // drift terms: w_j a'(s_j)/(l+1), row j, column per drift term
  std::vector<std::size_t> drift_offsets_;
  std::vector<double> drift_coeffs_;
  std::vector<std::size_t> active_;  // grid points with a nonzero drift row

  std::vector<double> cov_exact_;  // per grid point, slots x slots row-major
  std::vector<double> cov_lin_;
  std::vector<std::size_t> lin_left_;
  std::vector<std::size_t> lin_right_;
  std::vector<double> lin_weight_;
  std::vector<char> on_knot_;
};

double skorohod_pathwise(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan);
double conditional_pathwise(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan);
double error_sample(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan);

/// Quadrature along the path of s -> u_s(W_s, W_tau...) on the plan's grid.
double time_integral_pathwise(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan);

/// S-transform at g of the integration-by-parts integral, with every time
/// integral done exactly piecewise.
double skorohod_s_transform(const chaos::ChaosExpansion& u, const chaos::StepFunction& g);

/// int_0^1 (S u_s)(g) g(s) ds, the defining value of the Skorohod integral's
/// S-transform.
double s_transform_integral(const chaos::ChaosExpansion& u, const chaos::StepFunction& g);

}  // namespace skorohod::integrator
