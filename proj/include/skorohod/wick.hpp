#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "skorohod/gaussian.hpp"

namespace skorohod::wick {

inline constexpr int kMaxHermiteDegree = 64;
inline constexpr int kMaxMonomialDegree = 64;
/// Largest total degree accepted by the exact permanent in wick_inner.
inline constexpr int kMaxInnerDegree = 12;

/// Exponents (l_1, ..., l_m) of the Wick monomial X_1^{<>l_1} <> ... <> X_m^{<>l_m}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents);

  std::size_t size() const { return exps_.size(); }
  int operator[](std::size_t slot) const { return exps_[slot]; }
  std::span<const int> exponents() const { return exps_; }
  int total_degree() const;

  MultiIndex with_slot(std::size_t slot, int exponent) const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> exps_;
};

/// Variance-parameterised probabilists' Hermite polynomial h^k_var(x):
/// h^0 = 1, h^1 = x, h^{k+1} = x h^k - var k h^{k-1}.
double hermite(int k, double var, double x);

/// exp(x - var/2), the Wick exponential of a centred Gaussian with variance var.
double wick_exp(double x, double var);

/// A realisation of a Gaussian vector. Slots with zero variance must carry 0.
class WickValueContext {
 public:
  WickValueContext(gaussian::GaussianVector gv, std::vector<double> values);

  const gaussian::GaussianVector& vector() const { return gv_; }
  std::span<const double> values() const { return values_; }

 private:
  gaussian::GaussianVector gv_;
  std::vector<double> values_;
};

/// Value of the Wick monomial indexed by `mi` at the realisation in `ctx`.
double wick_monomial_value(const WickValueContext& ctx, const MultiIndex& mi);

/// All Wick monomials :x^m: for m in the box 0 <= m <= box with |m| <= max_total,
/// evaluated together by the multiset form of the Wick recursion
///   :X^m: = x_p :X^{m-e_p}: - sum_q C_{qp} (m-e_p)_q :X^{m-e_p-e_q}:.
/// The step plan depends only on the shape, so one table is reused for many
/// evaluations.
class WickTable {
 public:
  WickTable() = default;
  WickTable(std::span<const int> box, int max_total);

  std::size_t slots() const { return dims_.size(); }
  std::size_t size() const { return values_.size(); }
  std::size_t offset(std::span<const int> exponents) const;

  /// `cov` is the slots x slots covariance in row-major order.
  void evaluate(std::span<const double> cov, std::span<const double> x);

  double at(std::size_t offset) const { return values_[offset]; }
  double operator()(std::span<const int> exponents) const { return values_[offset(exponents)]; }

 private:
  struct Step {
    std::uint32_t target;
    std::uint32_t prev;
    std::uint32_t slot;
    std::uint32_t sub_begin;
    std::uint32_t sub_end;
  };
  struct Sub {
    std::uint32_t offset;
    std::uint32_t slot;
    double count;
  };

  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::vector<Step> steps_;
  std::vector<Sub> subs_;
  std::vector<double> values_;
};

/// Permanent by Ryser's formula with Gray-code subset order; O(2^d d).
double permanent(const Eigen::MatrixXd& a);

/// E[(X^{<>mi1}) (Y^{<>mi2})] for jointly Gaussian X (gv1) and Y (gv2) with
/// cross covariance E[X_i Y_j] = cross_cov(i, j). Zero unless the total
/// degrees agree; otherwise the permanent of the slot-expanded covariance
/// matrix, computed with Ryser's formula grouped by slot multiplicity.
double wick_inner(const MultiIndex& mi1, const MultiIndex& mi2, const gaussian::GaussianVector& gv1,
                  const gaussian::GaussianVector& gv2, const Eigen::MatrixXd& cross_cov);
double wick_inner(const MultiIndex& mi1, const MultiIndex& mi2, const Eigen::MatrixXd& cross_cov);

/// |l|! * prod var_i^{l_i}, an upper bound on E[(X^{<>mi})^2]; exact for a
/// single slot.
double wick_upper_bound(const MultiIndex& mi, const gaussian::GaussianVector& gv);

double factorial(int k);

}  // namespace skorohod::wick
