#include "skorohod/wick.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "skorohod/errors.hpp"

namespace skorohod::wick {

MultiIndex::MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw DomainError("multi-index exponents must be non-negative");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents) : MultiIndex(std::vector<int>(exponents)) {}

int MultiIndex::total_degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

MultiIndex MultiIndex::with_slot(std::size_t slot, int exponent) const {
  std::vector<int> e = exps_;
  e.at(slot) = exponent;
  return MultiIndex(std::move(e));
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double hermite(int k, double var, double x) {
  if (k < 0) throw DomainError("Hermite degree must be non-negative");
  if (k > kMaxHermiteDegree) {
    throw CapacityError("Hermite degree " + std::to_string(k) + " exceeds " + std::to_string(kMaxHermiteDegree));
  }
  if (var < 0.0) throw DomainError("Hermite variance must be non-negative");
  if (var == 0.0) return std::pow(x, k);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - var * j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double wick_exp(double x, double var) {
  if (var < 0.0) throw DomainError("variance must be non-negative");
  return std::exp(x - 0.5 * var);
}

// ---------------------------------------------------------------------------

WickValueContext::WickValueContext(gaussian::GaussianVector gv, std::vector<double> values)
    : gv_(std::move(gv)), values_(std::move(values)) {
  if (values_.size() != gv_.dim()) throw DomainError("realisation length does not match the Gaussian vector");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (gv_.variance(i) == 0.0 && values_[i] != 0.0) {
      throw DomainError("a zero-variance slot must carry the value 0");
    }
  }
}

WickTable::WickTable(std::span<const int> box, int max_total) {
  const std::size_t k = box.size();
  dims_.resize(k);
  strides_.resize(k);
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (box[i] < 0) throw DomainError("Wick table box must be non-negative");
    dims_[i] = box[i] + 1;
    total *= static_cast<std::size_t>(dims_[i]);
    if (total > (std::size_t{1} << 24)) throw CapacityError("Wick table too large");
  }
  for (std::size_t i = k; i-- > 0;) strides_[i] = i + 1 == k ? 1 : strides_[i + 1] * static_cast<std::size_t>(dims_[i + 1]);
  values_.assign(total, std::numeric_limits<double>::quiet_NaN());

  std::vector<int> m(k, 0);
  for (std::size_t off = 0; off < total; ++off) {
    std::size_t rem = off;
    int deg = 0;
    for (std::size_t i = 0; i < k; ++i) {
      m[i] = static_cast<int>(rem / strides_[i]);
      rem %= strides_[i];
      deg += m[i];
    }
    if (off == 0 || deg > max_total) continue;
    std::size_t p = k;
    while (m[--p] == 0) {
    }
    Step step{static_cast<std::uint32_t>(off), static_cast<std::uint32_t>(off - strides_[p]),
              static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(subs_.size()), 0};
    m[p] -= 1;
    for (std::size_t q = 0; q < k; ++q) {
      if (m[q] == 0) continue;
      subs_.push_back(Sub{static_cast<std::uint32_t>(step.prev - strides_[q]), static_cast<std::uint32_t>(q),
                          static_cast<double>(m[q])});
    }
    step.sub_end = static_cast<std::uint32_t>(subs_.size());
    steps_.push_back(step);
  }
}

std::size_t WickTable::offset(std::span<const int> exponents) const {
  if (exponents.size() != dims_.size()) throw DomainError("exponent count does not match the Wick table");
  std::size_t off = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (exponents[i] < 0 || exponents[i] >= dims_[i]) throw DomainError("exponent outside the Wick table box");
    off += static_cast<std::size_t>(exponents[i]) * strides_[i];
  }
  return off;
}

void WickTable::evaluate(std::span<const double> cov, std::span<const double> x) {
  const std::size_t k = dims_.size();
  values_[0] = 1.0;
  double* v = values_.data();
  const Sub* subs = subs_.data();
  for (const Step& s : steps_) {
    double acc = x[s.slot] * v[s.prev];
    for (std::uint32_t j = s.sub_begin; j < s.sub_end; ++j) {
      const Sub& sub = subs[j];
      acc -= cov[sub.slot * k + s.slot] * sub.count * v[sub.offset];
    }
    v[s.target] = acc;
  }
}

double wick_monomial_value(const WickValueContext& ctx, const MultiIndex& mi) {
  const auto& gv = ctx.vector();
  if (mi.size() != gv.dim()) throw DomainError("multi-index length does not match the Gaussian vector");
  const int degree = mi.total_degree();
  if (degree > kMaxMonomialDegree) {
    throw CapacityError("Wick monomial degree " + std::to_string(degree) + " exceeds " +
                        std::to_string(kMaxMonomialDegree));
  }
  for (std::size_t i = 0; i < mi.size(); ++i) {
    if (mi[i] > 0 && gv.variance(i) == 0.0) return 0.0;
  }
  const std::size_t k = gv.dim();
  std::vector<double> cov(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      cov[i * k + j] = gv.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  WickTable table(mi.exponents(), degree);
  table.evaluate(cov, ctx.values());
  return table(mi.exponents());
}

// ---------------------------------------------------------------------------

double permanent(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("permanent needs a square matrix");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  if (n > 30) throw CapacityError("permanent size exceeds 30");
  std::vector<double> row_sums(static_cast<std::size_t>(n), 0.0);
  double total = 0.0;
  std::uint64_t gray_prev = 0;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < limit; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t diff = gray ^ gray_prev;
    const int col = std::countr_zero(diff);
    const double sign_col = (gray & diff) ? 1.0 : -1.0;
    for (int r = 0; r < n; ++r) row_sums[static_cast<std::size_t>(r)] += sign_col * a(r, col);
    gray_prev = gray;
    double prod = 1.0;
    for (double s : row_sums) prod *= s;
    total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
  }
  return (n % 2 == 0) ? total : -total;
}

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Permanent of the matrix whose row slot i repeats rows[i] times and column
// slot j repeats cols[j] times, entries c(i, j). Ryser's inclusion-exclusion
// over column subsets, grouped by how many copies of each column slot are in
// the subset.
double grouped_permanent(std::span<const int> rows, std::span<const int> cols, const Eigen::MatrixXd& c) {
  const std::size_t nr = rows.size();
  const std::size_t nc = cols.size();
  const int d = std::accumulate(rows.begin(), rows.end(), 0);
  std::vector<int> k(nc, 0);
  double total = 0.0;
  while (true) {
    int chosen = 0;
    double weight = 1.0;
    for (std::size_t j = 0; j < nc; ++j) {
      chosen += k[j];
      weight *= binomial(cols[j], k[j]);
    }
    double prod = weight;
    for (std::size_t i = 0; i < nr && prod != 0.0; ++i) {
      if (rows[i] == 0) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < nc; ++j) s += k[j] * c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      prod *= std::pow(s, rows[i]);
    }
    total += ((d - chosen) % 2 == 0) ? prod : -prod;

    std::size_t j = 0;
    while (j < nc && k[j] == cols[j]) k[j++] = 0;
    if (j == nc) break;
    ++k[j];
  }
  return total;
}

double states(std::span<const int> e) {
  double s = 1.0;
  for (int x : e) s *= x + 1;
  return s;
}

}  // namespace

double wick_inner(const MultiIndex& mi1, const MultiIndex& mi2, const Eigen::MatrixXd& cross_cov) {
  if (cross_cov.rows() != static_cast<Eigen::Index>(mi1.size()) ||
      cross_cov.cols() != static_cast<Eigen::Index>(mi2.size())) {
    throw DomainError("cross covariance shape does not match the multi-indices");
  }
  const int d1 = mi1.total_degree();
  const int d2 = mi2.total_degree();
  if (d1 != d2) return 0.0;
  if (d1 > kMaxInnerDegree) {
    throw CapacityError("wick_inner degree " + std::to_string(d1) + " exceeds " + std::to_string(kMaxInnerDegree));
  }
  if (d1 == 0) return 1.0;
  if (states(mi2.exponents()) <= states(mi1.exponents())) {
    return grouped_permanent(mi1.exponents(), mi2.exponents(), cross_cov);
  }
  return grouped_permanent(mi2.exponents(), mi1.exponents(), cross_cov.transpose());
}

double wick_inner(const MultiIndex& mi1, const MultiIndex& mi2, const gaussian::GaussianVector& gv1,
                  const gaussian::GaussianVector& gv2, const Eigen::MatrixXd& cross_cov) {
  if (mi1.size() != gv1.dim() || mi2.size() != gv2.dim()) {
    throw DomainError("multi-index length does not match the Gaussian vector");
  }
  return wick_inner(mi1, mi2, cross_cov);
}

double wick_upper_bound(const MultiIndex& mi, const gaussian::GaussianVector& gv) {
  if (mi.size() != gv.dim()) throw DomainError("multi-index length does not match the Gaussian vector");
  // Every permutation term of the permanent is at most prod var_i^{l_i}
  // (Cauchy-Schwarz on each covariance entry), and there are |l|! of them.
  double bound = 1.0;
  for (std::size_t i = 0; i < mi.size(); ++i) {
    if (mi[i] > 0) bound *= std::pow(gv.variance(i), mi[i]);
  }
  return factorial(mi.total_degree()) * bound;
}

}  // namespace skorohod::wick
