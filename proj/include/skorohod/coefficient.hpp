#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace skorohod::chaos {

/// Dense polynomial in s, ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  std::span<const double> coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  double operator()(double s) const;
  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<double> c_;  // trailing zeros trimmed; empty means 0
};

/// Polynomial pieces on [b_0, b_1), ..., [b_{m-1}, b_m] with b_0 = 0, b_m = 1.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial();
  PiecewisePolynomial(std::vector<double> breakpoints, std::vector<Polynomial> pieces);
  static PiecewisePolynomial constant(double c);

  std::span<const double> breakpoints() const { return bp_; }
  std::span<const Polynomial> pieces() const { return pieces_; }
  bool is_zero() const;
  double operator()(double s) const;
  PiecewisePolynomial derivative() const;
  /// The same function expressed on the union of both breakpoint sets.
  PiecewisePolynomial refined(std::span<const double> breakpoints) const;

  friend PiecewisePolynomial operator+(const PiecewisePolynomial& a, const PiecewisePolynomial& b);
  friend PiecewisePolynomial operator*(const PiecewisePolynomial& a, const PiecewisePolynomial& b);
  bool operator==(const PiecewisePolynomial&) const = default;

 private:
  std::size_t piece_index(double s) const;

  std::vector<double> bp_;
  std::vector<Polynomial> pieces_;
};

enum class CoefficientKind { Polynomial, ExpPoly, UserPair };

std::string_view kind_name(CoefficientKind kind);

/// A C^1 coefficient a(s) on [0,1] together with its derivative.
///
/// Polynomial: exact derivative. ExpPoly: P(s) exp(Q(s)) with piecewise
/// polynomial P and Q; derivative (P' + P Q') exp(Q). UserPair: caller-supplied
/// value/derivative pair, checked against central differences on construction.
class Coefficient {
 public:
  using Fn = std::function<double(double)>;

  Coefficient();
  static Coefficient constant(double c);
  static Coefficient polynomial(std::vector<double> coeffs);
  static Coefficient polynomial(Polynomial p);
  static Coefficient exp_poly(PiecewisePolynomial prefactor, PiecewisePolynomial exponent);
  static Coefficient user_pair(Fn value, Fn derivative);

  CoefficientKind kind() const { return kind_; }
  double value(double s) const;
  double derivative_value(double s) const;
  Coefficient derivative() const;
  Coefficient scaled(double factor) const;

  bool is_zero() const;
  /// Interior points where the coefficient or its derivative may have kinks.
  std::vector<double> kinks() const;

  const Polynomial& poly() const { return poly_; }
  const PiecewisePolynomial& prefactor() const { return prefactor_; }
  const PiecewisePolynomial& exponent() const { return exponent_; }

  /// Structural equality; user pairs only compare equal to themselves.
  bool operator==(const Coefficient& other) const;

  friend Coefficient operator+(const Coefficient& a, const Coefficient& b);

 private:
  CoefficientKind kind_ = CoefficientKind::Polynomial;
  Polynomial poly_;
  PiecewisePolynomial prefactor_;
  PiecewisePolynomial exponent_;
  std::shared_ptr<const Fn> value_fn_;
  std::shared_ptr<const Fn> derivative_fn_;
};

}  // namespace skorohod::chaos
