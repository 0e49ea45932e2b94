#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "skorohod/errors.hpp"
#include "skorohod/gaussian.hpp"
#include "skorohod/sampling.hpp"
#include "skorohod/wick.hpp"
#include "stats.hpp"

using namespace skorohod;
using wick::MultiIndex;

namespace {

// --- oracles -------------------------------------------------------------

// Sum over all permutations.
double permanent_brute(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  double sum = 0.0;
  do {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= a(i, p[static_cast<std::size_t>(i)]);
    sum += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return n == 0 ? 1.0 : sum;
}

// Expand a multi-index into its list of slots with multiplicity.
std::vector<int> expand(const MultiIndex& mi) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mi.size(); ++i) out.insert(out.end(), static_cast<std::size_t>(mi[i]), static_cast<int>(i));
  return out;
}

// Plain Wick recursion over the variable list, no memo:
// :X_1..X_d: = X_d :X_1..X_{d-1}: - sum_{i<d} C(i,d) :X_1..X_{d-1} without X_i:.
double wick_naive(std::vector<int> vars, const Eigen::MatrixXd& cov, const std::vector<double>& x) {
  if (vars.empty()) return 1.0;
  const int last = vars.back();
  vars.pop_back();
  double v = x[static_cast<std::size_t>(last)] * wick_naive(vars, cov, x);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::vector<int> rest = vars;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    v -= cov(vars[i], last) * wick_naive(rest, cov, x);
  }
  return v;
}

// Permanent of the slot-expanded cross covariance.
double inner_brute(const MultiIndex& a, const MultiIndex& b, const Eigen::MatrixXd& cross) {
  const auto ea = expand(a);
  const auto eb = expand(b);
  if (ea.size() != eb.size()) return 0.0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(ea.size()), static_cast<Eigen::Index>(eb.size()));
  for (std::size_t i = 0; i < ea.size(); ++i) {
    for (std::size_t j = 0; j < eb.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cross(ea[i], eb[j]);
  }
  return permanent_brute(m);
}

gaussian::GaussianVector bvec(std::vector<double> t) { return gaussian::brownian_vector(t); }

MultiIndex random_mi(std::mt19937_64& rng, std::size_t slots, int max_total) {
  std::uniform_int_distribution<int> deg(0, max_total);
  std::uniform_int_distribution<std::size_t> slot(0, slots - 1);
  std::vector<int> e(slots, 0);
  const int d = deg(rng);
  for (int i = 0; i < d; ++i) ++e[slot(rng)];
  return MultiIndex(e);
}

}  // namespace

// --- hermite / wick_exp ----------------------------------------------------

TEST(Hermite, Examples) {
  EXPECT_DOUBLE_EQ(wick::hermite(2, 1.0, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(wick::hermite(0, 0.3, 7.0), 1.0);
  EXPECT_DOUBLE_EQ(wick::hermite(3, 0.5, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(wick::hermite(5, 0.0, 1.5), std::pow(1.5, 5));
  EXPECT_THROW(wick::hermite(65, 1.0, 0.0), CapacityError);
  EXPECT_THROW(wick::hermite(2, -1.0, 0.0), DomainError);
}

TEST(WickExp, ExamplesAndHermiteSeries) {
  EXPECT_DOUBLE_EQ(wick::wick_exp(0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(wick::wick_exp(1.0, 1.0), std::exp(0.5));
  EXPECT_DOUBLE_EQ(wick::wick_exp(0.3, 0.7), std::exp(-0.05));
  for (double x = -4.0; x <= 4.0; x += 0.5) {
    for (double var = 0.0; var <= 4.0; var += 0.5) {
      double series = 0.0;
      for (int k = 0; k <= 60; ++k) series += wick::hermite(k, var, x) / wick::factorial(k);
      EXPECT_NEAR(series, wick::wick_exp(x, var), 1e-9 * std::max(1.0, wick::wick_exp(x, var)))
          << "x=" << x << " var=" << var;
    }
  }
}

// --- monomials ---------------------------------------------------------------

TEST(WickMonomial, Examples) {
  const wick::WickValueContext one(bvec({1.0}), {0.7});
  EXPECT_NEAR(wick::wick_monomial_value(one, {2}), 0.49 - 1.0, 1e-15);

  const wick::WickValueContext two(bvec({0.3, 0.8}), {0.4, -1.1});
  EXPECT_NEAR(wick::wick_monomial_value(two, {1, 1}), 0.4 * -1.1 - 0.3, 1e-15);

  const wick::WickValueContext zero(bvec({0.0}), {0.0});
  for (int k = 1; k < 5; ++k) EXPECT_EQ(wick::wick_monomial_value(zero, MultiIndex{k}), 0.0);
  EXPECT_EQ(wick::wick_monomial_value(zero, MultiIndex{0}), 1.0);

  EXPECT_THROW(wick::WickValueContext(bvec({0.0}), {0.5}), DomainError);
  EXPECT_THROW(wick::wick_monomial_value(one, {1, 1}), DomainError);
  EXPECT_THROW(wick::wick_monomial_value(one, {65}), CapacityError);
}

TEST(WickMonomial, SingleSlotIsHermite) {
  for (double t : {0.2, 1.0}) {
    for (double x : {-1.3, 0.0, 0.9}) {
      const wick::WickValueContext ctx(bvec({t}), {x});
      for (int k = 0; k <= 20; ++k) {
        EXPECT_NEAR(wick::wick_monomial_value(ctx, MultiIndex{k}), wick::hermite(k, t, x),
                    1e-12 * std::max(1.0, std::abs(wick::hermite(k, t, x))));
      }
    }
  }
}

TEST(WickMonomial, MatchesNaiveRecursion) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 4;
    std::vector<double> t(k);
    for (double& v : t) v = u(rng);
    const auto gv = bvec(t);
    std::vector<double> x(k);
    for (double& v : x) v = z(rng);
    const auto mi = random_mi(rng, k, 7);
    const double want = wick_naive(expand(mi), gv.cov, x);
    EXPECT_NEAR(wick::wick_monomial_value(wick::WickValueContext(gv, x), mi), want, 1e-11 * std::max(1.0, std::abs(want)));
  }
}

TEST(WickTable, AllEntriesMatchSingleEvaluations) {
  const auto gv = bvec({0.4, 0.6, 1.0});
  const std::vector<double> x{0.3, -0.2, 1.4};
  std::vector<double> cov(9);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) cov[static_cast<std::size_t>(i * 3 + j)] = gv.cov(i, j);
  }
  const std::vector<int> box{3, 2, 4};
  wick::WickTable table(box, 6);
  table.evaluate(cov, x);
  const wick::WickValueContext ctx(gv, x);
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 2; ++b) {
      for (int c = 0; c <= 4; ++c) {
        if (a + b + c > 6) continue;
        const std::vector<int> e{a, b, c};
        EXPECT_NEAR(table(e), wick::wick_monomial_value(ctx, MultiIndex(e)), 1e-12);
      }
    }
  }
}

TEST(WickMonomial, PermutationInvariant) {
  const std::vector<double> t{0.2, 0.5, 0.9};
  const std::vector<double> x{0.1, -0.7, 1.2};
  const MultiIndex mi{2, 1, 3};
  const double base = wick::wick_monomial_value(wick::WickValueContext(bvec(t), x), mi);
  std::vector<int> p{0, 1, 2};
  while (std::next_permutation(p.begin(), p.end())) {
    std::vector<double> tp, xp;
    std::vector<int> ep;
    for (int i : p) {
      tp.push_back(t[static_cast<std::size_t>(i)]);
      xp.push_back(x[static_cast<std::size_t>(i)]);
      ep.push_back(mi[static_cast<std::size_t>(i)]);
    }
    EXPECT_NEAR(wick::wick_monomial_value(wick::WickValueContext(bvec(tp), xp), MultiIndex(ep)), base, 1e-12);
  }
}

// --- permanent / inner product ---------------------------------------------

TEST(Permanent, RyserMatchesBruteForce) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (int n = 0; n <= 8; ++n) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = z(rng);
    }
    const double want = permanent_brute(a);
    EXPECT_NEAR(wick::permanent(a), want, 1e-10 * std::max(1.0, std::abs(want))) << "n=" << n;
  }
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(5, 5);
  EXPECT_NEAR(wick::permanent(ones), 120.0, 1e-10);
}

TEST(WickInner, Examples) {
  const auto w1 = bvec({1.0});
  Eigen::MatrixXd c(1, 1);
  c << 1.0;
  EXPECT_NEAR(wick::wick_inner({2}, {2}, w1, w1, c), 2.0, 1e-15);
  c << 0.5;
  EXPECT_NEAR(wick::wick_inner({2}, {2}, w1, bvec({0.5}), c), 0.5, 1e-15);
  EXPECT_EQ(wick::wick_inner({1}, {2}, c), 0.0);
  EXPECT_EQ(wick::wick_inner({0}, {0}, c), 1.0);
  EXPECT_THROW(wick::wick_inner({13}, {13}, c), CapacityError);
  EXPECT_THROW(wick::wick_inner({1, 0}, {1}, c), DomainError);
}

TEST(WickInner, GroupedRyserMatchesPermutationSum) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t k1 = 1 + trial % 3;
    const std::size_t k2 = 1 + (trial / 3) % 3;
    std::vector<double> t1(k1), t2(k2);
    for (double& v : t1) v = u(rng);
    for (double& v : t2) v = u(rng);
    Eigen::MatrixXd cross(static_cast<Eigen::Index>(k1), static_cast<Eigen::Index>(k2));
    for (std::size_t i = 0; i < k1; ++i) {
      for (std::size_t j = 0; j < k2; ++j) cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::min(t1[i], t2[j]);
    }
    auto a = random_mi(rng, k1, 7);
    auto b = random_mi(rng, k2, 7);
    if (trial % 2 == 0) {
      // force equal degrees half the time
      std::vector<int> e(k2, 0);
      for (int i = 0; i < a.total_degree(); ++i) ++e[static_cast<std::size_t>(i) % k2];
      b = MultiIndex(e);
    }
    const double want = inner_brute(a, b, cross);
    EXPECT_NEAR(wick::wick_inner(a, b, cross), want, 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST(WickInner, PermutationInvariant) {
  const std::vector<double> t{0.2, 0.5, 0.9};
  const MultiIndex a{2, 0, 1};
  const MultiIndex b{1, 1, 1};
  const auto gv = bvec(t);
  const double base = wick::wick_inner(a, b, gv.cov);
  const std::vector<int> p{2, 0, 1};
  std::vector<double> tp;
  std::vector<int> ea, eb;
  for (int i : p) {
    tp.push_back(t[static_cast<std::size_t>(i)]);
    ea.push_back(a[static_cast<std::size_t>(i)]);
    eb.push_back(b[static_cast<std::size_t>(i)]);
  }
  EXPECT_NEAR(wick::wick_inner(MultiIndex(ea), MultiIndex(eb), bvec(tp).cov), base, 1e-12);
}

TEST(WickInner, MatchesMonteCarloAndOrthogonality) {
  std::mt19937_64 pick(4);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> t{u(pick), u(pick)};
    const auto gv = bvec(t);
    const MultiIndex a = random_mi(pick, 2, 4);
    MultiIndex b = random_mi(pick, 2, 4);
    if (trial % 2 == 0) b = MultiIndex{a.total_degree() - a.total_degree() / 2, a.total_degree() / 2};
    const Eigen::LLT<Eigen::MatrixXd> llt(gv.cov);
    const Eigen::MatrixXd l = llt.matrixL();
    auto rng = sampling::stream_rng(99, static_cast<std::uint64_t>(trial), 0);
    std::normal_distribution<double> z;
    std::vector<double> prod, first;
    for (int i = 0; i < 100000; ++i) {
      const Eigen::Vector2d e(z(rng), z(rng));
      const Eigen::Vector2d x = l * e;
      const wick::WickValueContext ctx(gv, {x(0), x(1)});
      const double va = wick::wick_monomial_value(ctx, a);
      prod.push_back(va * wick::wick_monomial_value(ctx, b));
      first.push_back(va);
    }
    EXPECT_TRUE(testutil::within(testutil::mean_se(prod), wick::wick_inner(a, b, gv.cov), 5.0));
    if (a.total_degree() >= 1) EXPECT_TRUE(testutil::within(testutil::mean_se(first), 0.0, 5.0));
  }
}

TEST(WickExp, ExponentialOfInnerProduct) {
  auto rng = sampling::stream_rng(7, 0, 0);
  std::normal_distribution<double> z;
  for (auto [s, t] : {std::pair{0.3, 0.7}, std::pair{0.5, 0.5}, std::pair{1.0, 0.2}}) {
    std::vector<double> prod;
    for (int i = 0; i < 100000; ++i) {
      const double a = std::sqrt(std::min(s, t)) * z(rng);
      const double ws = a + (s > t ? std::sqrt(s - t) * z(rng) : 0.0);
      const double wt = a + (t > s ? std::sqrt(t - s) * z(rng) : 0.0);
      prod.push_back(wick::wick_exp(ws, s) * wick::wick_exp(wt, t));
    }
    EXPECT_TRUE(testutil::within(testutil::mean_se(prod), std::exp(std::min(s, t)), 5.0));
  }
}

TEST(WickUpperBound, Examples) {
  EXPECT_EQ(wick::wick_upper_bound({2}, bvec({1.0})), 2.0);
  EXPECT_EQ(wick::wick_upper_bound({0, 0, 0}, bvec({0.1, 0.2, 0.3})), 1.0);
  EXPECT_EQ(wick::wick_upper_bound({1, 1}, bvec({1.0, 1.0})), 2.0);
  // attained by perfectly correlated slots: :X^2 X: = :X^3:
  EXPECT_EQ(wick::wick_upper_bound({2, 1}, bvec({1.0, 1.0})), 6.0);
  EXPECT_NEAR(wick::wick_inner({2, 1}, {2, 1}, bvec({1.0, 1.0}).cov), 6.0, 1e-12);
  // it really bounds the second moment
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gv = bvec({u(rng), u(rng), u(rng)});
    const auto mi = random_mi(rng, 3, 8);
    EXPECT_LE(wick::wick_inner(mi, mi, gv.cov), wick::wick_upper_bound(mi, gv) * (1 + 1e-12));
  }
}

TEST(MultiIndex, Basics) {
  const MultiIndex m{1, 0, 3};
  EXPECT_EQ(m.total_degree(), 4);
  EXPECT_EQ(m.with_slot(1, 2), (MultiIndex{1, 2, 3}));
  EXPECT_THROW(MultiIndex({1, -1}), DomainError);
  EXPECT_LT((MultiIndex{0, 1}), (MultiIndex{1, 0}));
}
