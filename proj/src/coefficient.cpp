#include "skorohod/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skorohod/errors.hpp"

namespace skorohod::chaos {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  for (double c : c_) {
    if (!std::isfinite(c)) throw DomainError("polynomial coefficients must be finite");
  }
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial{};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial{};
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return Polynomial(std::move(c));
}

// ---------------------------------------------------------------------------

PiecewisePolynomial::PiecewisePolynomial() : bp_{0.0, 1.0}, pieces_(1) {}

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breakpoints, std::vector<Polynomial> pieces)
    : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (bp_.size() < 2 || bp_.front() != 0.0 || bp_.back() != 1.0) {
    throw DomainError("piecewise polynomial breakpoints must run from 0 to 1");
  }
  for (std::size_t k = 1; k < bp_.size(); ++k) {
    if (!(bp_[k] > bp_[k - 1])) throw DomainError("piecewise polynomial breakpoints must increase strictly");
  }
  if (pieces_.size() + 1 != bp_.size()) throw DomainError("piecewise polynomial needs one piece per segment");
}

PiecewisePolynomial PiecewisePolynomial::constant(double c) { return PiecewisePolynomial({0.0, 1.0}, {Polynomial({c})}); }

bool PiecewisePolynomial::is_zero() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Polynomial& p) { return p.is_zero(); });
}

std::size_t PiecewisePolynomial::piece_index(double s) const {
  auto it = std::upper_bound(bp_.begin(), bp_.end(), s);
  std::size_t idx = it == bp_.begin() ? 0 : static_cast<std::size_t>(it - bp_.begin()) - 1;
  return std::min(idx, pieces_.size() - 1);
}

double PiecewisePolynomial::operator()(double s) const { return pieces_[piece_index(s)](s); }

PiecewisePolynomial PiecewisePolynomial::derivative() const {
  std::vector<Polynomial> d;
  d.reserve(pieces_.size());
  for (const auto& p : pieces_) d.push_back(p.derivative());
  return PiecewisePolynomial(bp_, std::move(d));
}

PiecewisePolynomial PiecewisePolynomial::refined(std::span<const double> breakpoints) const {
  std::vector<double> merged = bp_;
  merged.insert(merged.end(), breakpoints.begin(), breakpoints.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  std::vector<Polynomial> pieces;
  pieces.reserve(merged.size() - 1);
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    pieces.push_back(pieces_[piece_index(0.5 * (merged[k] + merged[k + 1]))]);
  }
  return PiecewisePolynomial(std::move(merged), std::move(pieces));
}

namespace {

template <typename Op>
PiecewisePolynomial combine(const PiecewisePolynomial& a, const PiecewisePolynomial& b, Op op) {
  const PiecewisePolynomial ra = a.refined(b.breakpoints());
  const PiecewisePolynomial rb = b.refined(a.breakpoints());
  std::vector<Polynomial> pieces;
  pieces.reserve(ra.pieces().size());
  for (std::size_t k = 0; k < ra.pieces().size(); ++k) pieces.push_back(op(ra.pieces()[k], rb.pieces()[k]));
  return PiecewisePolynomial(std::vector<double>(ra.breakpoints().begin(), ra.breakpoints().end()),
                             std::move(pieces));
}

}  // namespace

PiecewisePolynomial operator+(const PiecewisePolynomial& a, const PiecewisePolynomial& b) {
  return combine(a, b, [](const Polynomial& x, const Polynomial& y) { return x + y; });
}

PiecewisePolynomial operator*(const PiecewisePolynomial& a, const PiecewisePolynomial& b) {
  return combine(a, b, [](const Polynomial& x, const Polynomial& y) { return x * y; });
}

// ---------------------------------------------------------------------------

std::string_view kind_name(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::Polynomial:
      return "polynomial";
    case CoefficientKind::ExpPoly:
      return "exppoly";
    case CoefficientKind::UserPair:
      return "userpair";
  }
  return "unknown";
}

Coefficient::Coefficient() = default;

Coefficient Coefficient::constant(double c) { return polynomial(std::vector<double>{c}); }

Coefficient Coefficient::polynomial(std::vector<double> coeffs) { return polynomial(Polynomial(std::move(coeffs))); }

Coefficient Coefficient::polynomial(Polynomial p) {
  Coefficient c;
  c.kind_ = CoefficientKind::Polynomial;
  c.poly_ = std::move(p);
  return c;
}

Coefficient Coefficient::exp_poly(PiecewisePolynomial prefactor, PiecewisePolynomial exponent) {
  Coefficient c;
  c.kind_ = CoefficientKind::ExpPoly;
  c.prefactor_ = std::move(prefactor);
  c.exponent_ = std::move(exponent);
  return c;
}

namespace {

double central_difference(const Coefficient::Fn& f, double s, double h) {
  const double lo = std::max(0.0, s - h);
  const double hi = std::min(1.0, s + h);
  return (f(hi) - f(lo)) / (hi - lo);
}

}  // namespace

Coefficient Coefficient::user_pair(Fn value, Fn derivative) {
  if (!value || !derivative) throw DomainError("user coefficient needs both value and derivative");
  constexpr int kChecks = 20;
  for (int k = 0; k < kChecks; ++k) {
    const double s = (k + 0.5) / kChecks;
    const double fd = central_difference(value, s, 1e-5);
    const double d = derivative(s);
    if (std::abs(fd - d) > 1e-5 * std::max(1.0, std::abs(d))) {
      throw DomainError("user coefficient derivative disagrees with finite differences at s=" + std::to_string(s));
    }
  }
  Coefficient c;
  c.kind_ = CoefficientKind::UserPair;
  c.value_fn_ = std::make_shared<const Fn>(std::move(value));
  c.derivative_fn_ = std::make_shared<const Fn>(std::move(derivative));
  return c;
}

double Coefficient::value(double s) const {
  switch (kind_) {
    case CoefficientKind::Polynomial:
      return poly_(s);
    case CoefficientKind::ExpPoly:
      return prefactor_(s) * std::exp(exponent_(s));
    case CoefficientKind::UserPair:
      return (*value_fn_)(s);
  }
  return 0.0;
}

double Coefficient::derivative_value(double s) const {
  switch (kind_) {
    case CoefficientKind::Polynomial:
      return poly_.derivative()(s);
    case CoefficientKind::ExpPoly: {
      const double p = prefactor_(s);
      const double dp = prefactor_.derivative()(s);
      const double dq = exponent_.derivative()(s);
      return (dp + p * dq) * std::exp(exponent_(s));
    }
    case CoefficientKind::UserPair:
      return (*derivative_fn_)(s);
  }
  return 0.0;
}

Coefficient Coefficient::derivative() const {
  switch (kind_) {
    case CoefficientKind::Polynomial:
      return polynomial(poly_.derivative());
    case CoefficientKind::ExpPoly:
      return exp_poly(prefactor_.derivative() + prefactor_ * exponent_.derivative(), exponent_);
    case CoefficientKind::UserPair: {
      Coefficient c;
      c.kind_ = CoefficientKind::UserPair;
      c.value_fn_ = derivative_fn_;
      auto inner = derivative_fn_;
      c.derivative_fn_ = std::make_shared<const Fn>([inner](double s) { return central_difference(*inner, s, 1e-5); });
      return c;
    }
  }
  return {};
}

Coefficient Coefficient::scaled(double factor) const {
  switch (kind_) {
    case CoefficientKind::Polynomial:
      return polynomial(poly_ * Polynomial({factor}));
    case CoefficientKind::ExpPoly:
      return exp_poly(prefactor_ * PiecewisePolynomial::constant(factor), exponent_);
    case CoefficientKind::UserPair: {
      Coefficient c;
      c.kind_ = CoefficientKind::UserPair;
      auto v = value_fn_;
      auto d = derivative_fn_;
      c.value_fn_ = std::make_shared<const Fn>([v, factor](double s) { return factor * (*v)(s); });
      c.derivative_fn_ = std::make_shared<const Fn>([d, factor](double s) { return factor * (*d)(s); });
      return c;
    }
  }
  return {};
}

bool Coefficient::is_zero() const {
  switch (kind_) {
    case CoefficientKind::Polynomial:
      return poly_.is_zero();
    case CoefficientKind::ExpPoly:
      return prefactor_.is_zero();
    case CoefficientKind::UserPair:
      return false;
  }
  return false;
}

std::vector<double> Coefficient::kinks() const {
  std::vector<double> k;
  if (kind_ != CoefficientKind::ExpPoly) return k;
  for (auto bp : {prefactor_.breakpoints(), exponent_.breakpoints()}) {
    for (double b : bp) {
      if (b > 0.0 && b < 1.0) k.push_back(b);
    }
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

bool Coefficient::operator==(const Coefficient& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case CoefficientKind::Polynomial:
      return poly_ == other.poly_;
    case CoefficientKind::ExpPoly:
      return prefactor_ == other.prefactor_ && exponent_ == other.exponent_;
    case CoefficientKind::UserPair:
      return value_fn_ == other.value_fn_ && derivative_fn_ == other.derivative_fn_;
  }
  return false;
}

Coefficient operator+(const Coefficient& a, const Coefficient& b) {
  if (a.kind_ == CoefficientKind::Polynomial && b.kind_ == CoefficientKind::Polynomial) {
    return Coefficient::polynomial(a.poly_ + b.poly_);
  }
  if (a.kind_ == CoefficientKind::ExpPoly && b.kind_ == CoefficientKind::ExpPoly && a.exponent_ == b.exponent_) {
    return Coefficient::exp_poly(a.prefactor_ + b.prefactor_, a.exponent_);
  }
  throw UnsupportedError("cannot add coefficients of kinds " + std::string(kind_name(a.kind_)) + " and " +
                         std::string(kind_name(b.kind_)));
}

}  // namespace skorohod::chaos
