#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "skorohod/coefficient.hpp"
#include "skorohod/wick.hpp"

namespace skorohod::chaos {

/// a(s) * W_s^{<>l_1} <> W_{tau_2}^{<>l_2} <> ... <> W_{tau_K}^{<>l_K}.
struct ChaosTerm {
  Coefficient coeff;
  wick::MultiIndex mi;

  bool operator==(const ChaosTerm&) const = default;
};

/// Finite Wiener-chaos expansion of an integrand u_s = f(s, W_s, W_{tau_2}, ..., W_{tau_K})
/// with one dynamic slot (index 0, evaluated at s) and K-1 frozen slots.
///
/// Terms are kept sorted by multi-index; identically zero coefficients are
/// dropped and polynomial terms sharing a multi-index are merged. Values are
/// immutable once built.
class ChaosExpansion {
 public:
  ChaosExpansion(int slots, std::vector<double> taus, std::vector<ChaosTerm> terms);
  static ChaosExpansion zero(int slots, std::vector<double> taus);

  int slots() const { return slots_; }
  std::span<const double> taus() const { return taus_; }
  std::span<const ChaosTerm> terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_degree() const;

  /// (s, tau_2, ..., tau_K).
  std::vector<double> slot_times(double s) const;
  /// Every interior point where a time integrand built from this expansion
  /// may fail to be smooth: the taus and coefficient breakpoints.
  std::vector<double> kinks() const;

  bool operator==(const ChaosExpansion& other) const;

 private:
  int slots_;
  std::vector<double> taus_;
  std::vector<ChaosTerm> terms_;
};

/// Step function g on [0,1]: level[k] on [b_k, b_{k+1}).
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> levels);
  static StepFunction constant(double level);

  std::span<const double> breakpoints() const { return bp_; }
  std::span<const double> levels() const { return levels_; }
  double operator()(double s) const;
  /// int_0^t g(r) dr, exact.
  double antiderivative(double t) const;

 private:
  std::vector<double> bp_;
  std::vector<double> levels_;
};

/// L f: every coefficient replaced by its time derivative.
ChaosExpansion apply_L(const ChaosExpansion& u);

/// d/dx_slot f: l_slot * a * monomial with l_slot lowered by one; slot 0 is
/// the dynamic slot.
ChaosExpansion apply_dx(const ChaosExpansion& u, std::size_t slot);

struct ItoDecomposition {
  ChaosExpansion integrand;  // d/dx_1 f
  ChaosExpansion drift;      // L f
};

ItoDecomposition ito_decompose(const ChaosExpansion& f);

/// (S u_s)(g) = sum a(s) prod_i (int_0^{t_i} g)^{l_i} with t_1 = s.
double s_transform(const ChaosExpansion& u, const StepFunction& g, double s);

/// E[u_s^2].
double second_moment(const ChaosExpansion& u, double s);

/// E[u_s v_r] for expansions over the same taus.
double cross_moment(const ChaosExpansion& u, double s, const ChaosExpansion& v, double r);

/// Pathwise value of u at time t given x = (W_t, W_{tau_2}, ..., W_{tau_K}).
double evaluate(const ChaosExpansion& u, double t, std::span<const double> x);

/// Coefficient-wise agreement at `samples` points of [0,1] after canonical
/// ordering; both expansions must share slots and taus.
bool approx_equal(const ChaosExpansion& a, const ChaosExpansion& b, int samples = 20, double tol = 1e-12);

/// Truncated expansion of u_s = sin(W_s + W_{tau_2} + ... + W_{tau_K}).
///
/// With X = W_s + sum W_tau and sigma^2(s) = ||X||^2, sin X = exp(-sigma^2/2)
/// sin<>(X) and sin<>(X) = sum_m (-1)^m X^{<>(2m+1)}/(2m+1)!; expanding the
/// Wick power multinomially gives
///   a_l(s) = (-1)^{(|l|-1)/2} / prod l_i! * exp(-sigma^2(s)/2)  for odd |l| <= max_degree.
struct TruncatedExpansion {
  ChaosExpansion expansion;
  /// Upper bound on int_0^1 E[(L u - L u_truncated)_s^2] ds.
  double drift_tail_bound;
};

TruncatedExpansion wick_sine_expansion(std::vector<double> taus, int max_degree);

}  // namespace skorohod::chaos
