#include "skorohod/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "skorohod/errors.hpp"
#include "skorohod/gaussian.hpp"
#include "skorohod/quadrature.hpp"

namespace skorohod::chaos {

ChaosExpansion::ChaosExpansion(int slots, std::vector<double> taus, std::vector<ChaosTerm> terms)
    : slots_(slots), taus_(std::move(taus)) {
  if (slots_ < 1) throw DomainError("an expansion needs at least the dynamic slot");
  if (taus_.size() != static_cast<std::size_t>(slots_ - 1)) {
    throw DomainError("expected " + std::to_string(slots_ - 1) + " frozen times, got " + std::to_string(taus_.size()));
  }
  for (double t : taus_) gaussian::TimePoint checked(t);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].mi.size() != static_cast<std::size_t>(slots_)) {
      throw DomainError("term " + std::to_string(i) + " has " + std::to_string(terms[i].mi.size()) +
                        " exponents, expected " + std::to_string(slots_));
    }
    const int degree = terms[i].mi.total_degree();
    if (degree > wick::kMaxInnerDegree) {
      throw CapacityError("term " + std::to_string(i) + " has total degree " + std::to_string(degree) +
                          ", above the limit " + std::to_string(wick::kMaxInnerDegree));
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [](const ChaosTerm& a, const ChaosTerm& b) { return a.mi < b.mi; });
  for (auto& t : terms) {
    if (t.coeff.is_zero()) continue;
    if (!terms_.empty() && terms_.back().mi == t.mi) {
      try {
        terms_.back().coeff = terms_.back().coeff + t.coeff;
        continue;
      } catch (const UnsupportedError&) {
      }
    }
    terms_.push_back(std::move(t));
  }
  std::erase_if(terms_, [](const ChaosTerm& t) { return t.coeff.is_zero(); });
}

ChaosExpansion ChaosExpansion::zero(int slots, std::vector<double> taus) { return {slots, std::move(taus), {}}; }

int ChaosExpansion::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mi.total_degree());
  return d;
}

std::vector<double> ChaosExpansion::slot_times(double s) const {
  std::vector<double> times;
  times.reserve(taus_.size() + 1);
  times.push_back(s);
  times.insert(times.end(), taus_.begin(), taus_.end());
  return times;
}

std::vector<double> ChaosExpansion::kinks() const {
  std::vector<double> k(taus_.begin(), taus_.end());
  for (const auto& t : terms_) {
    auto ck = t.coeff.kinks();
    k.insert(k.end(), ck.begin(), ck.end());
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

bool ChaosExpansion::operator==(const ChaosExpansion& other) const {
  return slots_ == other.slots_ && taus_ == other.taus_ && terms_ == other.terms_;
}

// ---------------------------------------------------------------------------

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> levels)
    : bp_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (bp_.size() < 2 || bp_.front() != 0.0 || bp_.back() != 1.0) {
    throw DomainError("step function breakpoints must run from 0 to 1");
  }
  for (std::size_t k = 1; k < bp_.size(); ++k) {
    if (!(bp_[k] > bp_[k - 1])) throw DomainError("step function breakpoints must increase strictly");
  }
  if (levels_.size() + 1 != bp_.size()) throw DomainError("step function needs one level per segment");
}

StepFunction StepFunction::constant(double level) { return StepFunction({0.0, 1.0}, {level}); }

double StepFunction::operator()(double s) const {
  auto it = std::upper_bound(bp_.begin(), bp_.end(), s);
  std::size_t idx = it == bp_.begin() ? 0 : static_cast<std::size_t>(it - bp_.begin()) - 1;
  return levels_[std::min(idx, levels_.size() - 1)];
}

double StepFunction::antiderivative(double t) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (t <= bp_[k]) break;
    acc += levels_[k] * (std::min(t, bp_[k + 1]) - bp_[k]);
  }
  return acc;
}

// ---------------------------------------------------------------------------

ChaosExpansion apply_L(const ChaosExpansion& u) {
  std::vector<ChaosTerm> out;
  out.reserve(u.terms().size());
  for (const auto& t : u.terms()) out.push_back({t.coeff.derivative(), t.mi});
  return {u.slots(), std::vector<double>(u.taus().begin(), u.taus().end()), std::move(out)};
}

ChaosExpansion apply_dx(const ChaosExpansion& u, std::size_t slot) {
  if (slot >= static_cast<std::size_t>(u.slots())) {
    throw DomainError("slot " + std::to_string(slot) + " out of range for " + std::to_string(u.slots()) + " slots");
  }
  std::vector<ChaosTerm> out;
  for (const auto& t : u.terms()) {
    const int l = t.mi[slot];
    if (l == 0) continue;
    out.push_back({t.coeff.scaled(l), t.mi.with_slot(slot, l - 1)});
  }
  return {u.slots(), std::vector<double>(u.taus().begin(), u.taus().end()), std::move(out)};
}

ItoDecomposition ito_decompose(const ChaosExpansion& f) { return {apply_dx(f, 0), apply_L(f)}; }

double s_transform(const ChaosExpansion& u, const StepFunction& g, double s) {
  const auto times = u.slot_times(s);
  std::vector<double> g_int(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) g_int[i] = g.antiderivative(times[i]);
  double total = 0.0;
  for (const auto& t : u.terms()) {
    double prod = t.coeff.value(s);
    for (std::size_t i = 0; i < times.size(); ++i) prod *= std::pow(g_int[i], t.mi[i]);
    total += prod;
  }
  return total;
}

double cross_moment(const ChaosExpansion& u, double s, const ChaosExpansion& v, double r) {
  if (u.slots() != v.slots() || !std::equal(u.taus().begin(), u.taus().end(), v.taus().begin())) {
    throw DomainError("cross moment needs expansions over the same frozen times");
  }
  const auto ts = u.slot_times(s);
  const auto tr = v.slot_times(r);
  const auto k = static_cast<Eigen::Index>(ts.size());
  Eigen::MatrixXd cross(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      cross(i, j) = std::min(ts[static_cast<std::size_t>(i)], tr[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<double> av(u.terms().size());
  std::vector<double> bv(v.terms().size());
  for (std::size_t i = 0; i < av.size(); ++i) av[i] = u.terms()[i].coeff.value(s);
  for (std::size_t j = 0; j < bv.size(); ++j) bv[j] = v.terms()[j].coeff.value(r);
  double total = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const auto& mi = u.terms()[i].mi;
    for (std::size_t j = 0; j < bv.size(); ++j) {
      const auto& mj = v.terms()[j].mi;
      if (mi.total_degree() != mj.total_degree()) continue;
      total += av[i] * bv[j] * wick::wick_inner(mi, mj, cross);
    }
  }
  return total;
}

double second_moment(const ChaosExpansion& u, double s) { return cross_moment(u, s, u, s); }

double evaluate(const ChaosExpansion& u, double t, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(u.slots())) throw DomainError("value count does not match slot count");
  if (u.empty()) return 0.0;
  const auto times = u.slot_times(t);
  const std::size_t k = times.size();
  std::vector<int> box(k, 0);
  for (const auto& term : u.terms()) {
    for (std::size_t i = 0; i < k; ++i) box[i] = std::max(box[i], term.mi[i]);
  }
  std::vector<double> cov(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) cov[i * k + j] = std::min(times[i], times[j]);
  }
  wick::WickTable table(box, u.max_degree());
  table.evaluate(cov, x);
  double total = 0.0;
  for (const auto& term : u.terms()) total += term.coeff.value(t) * table(term.mi.exponents());
  return total;
}

bool approx_equal(const ChaosExpansion& a, const ChaosExpansion& b, int samples, double tol) {
  if (a.slots() != b.slots() || !std::equal(a.taus().begin(), a.taus().end(), b.taus().begin())) return false;
  if (a.terms().size() != b.terms().size()) return false;
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> points(static_cast<std::size_t>(samples));
  for (double& p : points) p = unif(rng);
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    const auto& ta = a.terms()[i];
    const auto& tb = b.terms()[i];
    if (!(ta.mi == tb.mi)) return false;
    for (double s : points) {
      const double va = ta.coeff.value(s);
      const double vb = tb.coeff.value(s);
      if (std::abs(va - vb) > tol * std::max(1.0, std::abs(va))) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

void compositions(int total, std::size_t parts, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (current.size() + 1 == parts) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    current.push_back(first);
    compositions(total - first, parts, current, out);
    current.pop_back();
  }
}

}  // namespace

TruncatedExpansion wick_sine_expansion(std::vector<double> taus, int max_degree) {
  if (max_degree < 0) throw DomainError("truncation degree must be non-negative");
  const std::size_t slots = taus.size() + 1;
  double frozen_norm = 0.0;
  for (double a : taus) {
    for (double b : taus) frozen_norm += std::min(a, b);
  }

  // sigma^2(s) = s + 2 sum min(s, tau_i) + sum_ij min(tau_i, tau_j), linear between taus.
  const auto bp = quadrature::segment_breakpoints(taus);
  std::vector<Polynomial> exponent_pieces;
  std::vector<double> sigma_slope;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double mid = 0.5 * (bp[k] + bp[k + 1]);
    double slope = 1.0;
    double intercept = frozen_norm;
    for (double t : taus) {
      if (t > mid) {
        slope += 2.0;
      } else {
        intercept += 2.0 * t;
      }
    }
    sigma_slope.push_back(slope);
    exponent_pieces.push_back(Polynomial({-0.5 * intercept, -0.5 * slope}));
  }
  const PiecewisePolynomial exponent(bp, exponent_pieces);

  std::vector<ChaosTerm> terms;
  for (int d = 1; d <= max_degree; d += 2) {
    const double sign = ((d - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    std::vector<std::vector<int>> comps;
    std::vector<int> current;
    compositions(d, slots, current, comps);
    for (auto& c : comps) {
      double denom = 1.0;
      for (int l : c) denom *= wick::factorial(l);
      terms.push_back({Coefficient::exp_poly(PiecewisePolynomial::constant(sign / denom), exponent),
                       wick::MultiIndex(std::move(c))});
    }
  }

  // Tail of L u: pi_d(L u) = -(sigma^2)'/2 * exp(-sigma^2/2) * (-1)^m X^{<>d}/d!, and the
  // Wick-analytic growth constant of the sine series is 1, so
  // E[pi_d(L u)^2] <= ((sigma^2)'/2)^2 exp(-sigma^2) (1/d!)^2 * wick_upper_bound(X^{<>d}).
  auto sigma2 = [&](double s) { return -2.0 * exponent(s); };
  auto tail_density = [&](double s) {
    const std::size_t piece = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), s) - bp.begin()) - 1, sigma_slope.size() - 1);
    const double var = sigma2(s);
    gaussian::GaussianVector x;
    x.points.push_back({gaussian::TimePoint(s)});
    x.cov = Eigen::MatrixXd::Constant(1, 1, var);
    const double drift = 0.5 * sigma_slope[piece];
    double acc = 0.0;
    for (int d = max_degree + 1; d <= max_degree + 80; ++d) {
      if (d % 2 == 0) continue;
      const double coeff = 1.0 / wick::factorial(d);
      acc += coeff * coeff * wick::wick_upper_bound(wick::MultiIndex{d}, x);
    }
    return drift * drift * std::exp(-var) * acc;
  };
  const double tail = quadrature::integrate_checked(tail_density, bp);

  return {ChaosExpansion(static_cast<int>(slots), std::move(taus), std::move(terms)), tail};
}

}  // namespace skorohod::chaos
