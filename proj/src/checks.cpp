#include "skorohod/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "skorohod/errors.hpp"
#include "skorohod/experiment.hpp"
#include "skorohod/gaussian.hpp"
#include "skorohod/quadrature.hpp"
#include "skorohod/wick.hpp"

namespace skorohod::checks {

namespace {

constexpr int kSamplePoints = 25;

bool values_constant(const chaos::Coefficient& c) {
  const double ref = c.value(0.0);
  for (int k = 1; k <= kSamplePoints; ++k) {
    const double v = c.value(static_cast<double>(k) / kSamplePoints);
    if (std::abs(v - ref) > 1e-12 * std::max(1.0, std::abs(ref))) return false;
  }
  return true;
}

bool values_zero(const chaos::Coefficient& c) {
  for (int k = 0; k <= kSamplePoints; ++k) {
    if (std::abs(c.value(static_cast<double>(k) / kSamplePoints)) > 1e-12) return false;
  }
  return true;
}

double coefficient_size(const chaos::Coefficient& c) {
  if (c.kind() == chaos::CoefficientKind::Polynomial) {
    double s = 0.0;
    for (double x : c.poly().coeffs()) s += std::abs(x) * 8.0;
    return s;
  }
  double s = 0.0;
  for (int k = 0; k <= kSamplePoints; ++k) {
    const double t = static_cast<double>(k) / kSamplePoints;
    s = std::max(s, std::abs(c.value(t)) + std::abs(c.derivative_value(t)));
  }
  return s;
}

}  // namespace

ExactVerdict exact_check(const chaos::ChaosExpansion& u, std::uint64_t seed) {
  ExactVerdict v;
  v.constant_coefficients = std::all_of(u.terms().begin(), u.terms().end(),
                                        [](const chaos::ChaosTerm& t) { return values_constant(t.coeff); });
  const auto lu = chaos::apply_L(u);
  v.drift_vanishes =
      std::all_of(lu.terms().begin(), lu.terms().end(), [](const chaos::ChaosTerm& t) { return values_zero(t.coeff); });
  v.e4_hat = experiment::mc_error(u, {4, 16, integrator::Quadrature::Trapezoid}, 200, seed).e_hat;
  v.mc_exact = v.e4_hat <= experiment::kExactThreshold;
  return v;
}

ItoResidual ito_residual(const chaos::ChaosExpansion& f, const integrator::BrownianPath& path,
                         const integrator::EvaluationPlan& plan) {
  const auto taus = f.taus();
  const auto grid = integrator::fine_grid(plan.n, plan.fine_factor, taus);
  std::vector<double> x(static_cast<std::size_t>(f.slots()), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = path.values.at(integrator::grid_index(grid, taus[i - 1]));
  const double at0 = chaos::evaluate(f, 0.0, x);
  x[0] = path.values.back();
  const double at1 = chaos::evaluate(f, 1.0, x);

  const auto parts = chaos::ito_decompose(f);
  ItoResidual r;
  r.lhs = at1 - at0;
  r.rhs = integrator::skorohod_pathwise(parts.integrand, path, plan) +
          integrator::time_integral_pathwise(parts.drift, path, plan);

  // Quadrature only touches terms without a dynamic factor: a'(s) times a
  // frozen Wick monomial. Size each such term by its coefficient and the
  // monomial's value on this path.
  r.scale = 1.0;
  const std::size_t k = x.size();
  for (const auto& t : f.terms()) {
    if (t.mi[0] != 0) continue;
    chaos::ChaosExpansion single(f.slots(), std::vector<double>(taus.begin(), taus.end()),
                                 {{chaos::Coefficient::constant(1.0), t.mi}});
    std::vector<double> xf(k, 0.0);
    for (std::size_t i = 1; i < k; ++i) xf[i] = x[i];
    r.scale += coefficient_size(t.coeff) * std::abs(chaos::evaluate(single, 0.0, xf));
  }
  return r;
}

chaos::ChaosExpansion random_expansion(sampling::Rng& rng, int slots, std::vector<double> taus, int max_degree,
                                       int max_poly_degree, int max_terms) {
  std::uniform_int_distribution<int> n_terms(1, max_terms);
  std::uniform_int_distribution<int> degree(0, max_degree);
  std::uniform_int_distribution<int> slot(0, slots - 1);
  std::uniform_int_distribution<int> poly_degree(0, max_poly_degree);
  std::normal_distribution<double> normal;
  std::vector<chaos::ChaosTerm> terms;
  const int count = n_terms(rng);
  for (int t = 0; t < count; ++t) {
    std::vector<int> e(static_cast<std::size_t>(slots), 0);
    const int d = degree(rng);
    for (int j = 0; j < d; ++j) ++e[static_cast<std::size_t>(slot(rng))];
    std::vector<double> c(static_cast<std::size_t>(poly_degree(rng)) + 1);
    for (double& x : c) x = normal(rng);
    terms.push_back({chaos::Coefficient::polynomial(std::move(c)), wick::MultiIndex(std::move(e))});
  }
  return {slots, std::move(taus), std::move(terms)};
}

chaos::StepFunction random_step_function(sampling::Rng& rng, int max_pieces) {
  std::uniform_int_distribution<int> pieces(1, max_pieces);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::normal_distribution<double> normal;
  const int m = pieces(rng);
  std::vector<double> bp{0.0, 1.0};
  while (static_cast<int>(bp.size()) < m + 1) {
    const double b = unif(rng);
    if (std::none_of(bp.begin(), bp.end(), [&](double x) { return std::abs(x - b) < 1e-3; })) bp.push_back(b);
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> levels(bp.size() - 1);
  for (double& l : levels) l = normal(rng);
  return {std::move(bp), std::move(levels)};
}

// ---------------------------------------------------------------------------

namespace {

class Group {
 public:
  explicit Group(std::string name) { result_.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    result_.passed = false;
    if (!result_.detail.empty()) result_.detail += "; ";
    result_.detail += what;
  }

  template <typename Fn>
  GroupResult run(Fn fn) {
    try {
      fn(*this);
    } catch (const std::exception& e) {
      expect(false, std::string("exception: ") + e.what());
    }
    if (result_.passed && result_.detail.empty()) result_.detail = "ok";
    return result_;
  }

 private:
  GroupResult result_;
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// E[X Y] estimate within `z` standard errors of `expected`.
bool within_se(const std::vector<double>& samples, double expected, double z) {
  const double m = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  double v = 0.0;
  for (double x : samples) v += (x - m) * (x - m);
  v /= static_cast<double>(samples.size() - 1);
  const double se = std::sqrt(v / static_cast<double>(samples.size()));
  return std::abs(m - expected) <= z * se + 1e-12;
}

double permutation_permanent(const Eigen::MatrixXd& a) {
  std::vector<int> perm(static_cast<std::size_t>(a.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    double p = 1.0;
    for (std::size_t i = 0; i < perm.size(); ++i) p *= a(static_cast<Eigen::Index>(i), perm[i]);
    total += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

void gaussian_group(Group& g, sampling::Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n : {1, 2, 3, 5, 8}) {
    for (int k = 0; k < 200; ++k) {
      const gaussian::TimePoint s(unif(rng));
      const gaussian::TimePoint t(unif(rng));
      const double lin = gaussian::cov_lin(s, t, n);
      const double bb = gaussian::cov_bridge_bridge(s, t, n);
      const double w = gaussian::cov_brownian(s, t);
      if (std::abs(w - lin - bb) > 1e-12) {
        g.expect(false, "cov_brownian != cov_lin + cov_bridge_bridge at n=" + std::to_string(n));
        return;
      }
      if (lin > w + 1e-15) {
        g.expect(false, "cov_lin exceeds cov_brownian");
        return;
      }
      if (gaussian::cov_bridge_bridge(s, s, n) > 0.25 / n + 1e-15) {
        g.expect(false, "bridge variance above 1/(4n)");
        return;
      }
    }
  }
  for (int n : {1, 2, 4, 7}) {
    for (int i = 1; i <= n; ++i) {
      const double a = static_cast<double>(i - 1) / n;
      const double b = static_cast<double>(i) / n;
      const double q = 2.0 * quadrature::integrate_lower_triangle(
                                 [&](double x, double y) {
                                   return gaussian::cov_bridge_bridge(gaussian::TimePoint(x), gaussian::TimePoint(y), n);
                                 },
                                 a, b, 8);
      g.expect(std::abs(q - gaussian::bridge_double_integral(i, i, n)) <= 1e-8 * q,
               "bridge double integral disagrees with quadrature");
    }
  }
  const std::vector<gaussian::Point> pts{{gaussian::TimePoint(0.5), gaussian::Family::W},
                                         {gaussian::TimePoint(0.5), gaussian::Family::Wlin}};
  const auto gv = gaussian::build_gaussian_vector(pts, 1);
  g.expect(std::abs(gv.cov(0, 1) - 0.25) < 1e-15 && std::abs(gv.cov(1, 1) - 0.25) < 1e-15,
           "Gaussian vector (W_0.5, Wlin_0.5) has the wrong covariance");

  // Empirical covariance of sampled interpolants against the kernel.
  const int n = 4;
  const auto grid = integrator::fine_grid(n, 4, {});
  const sampling::PathSampler sampler(grid);
  std::vector<double> w(grid.size());
  std::vector<double> prod;
  const double s = 0.3;
  const double t = 0.4;
  auto interp = [&](double x) {
    const int c = gaussian::cell_index(x, n);
    const double a = static_cast<double>(c) / n;
    return w[static_cast<std::size_t>(4 * c)] + (x - a) * n * (w[static_cast<std::size_t>(4 * c + 4)] - w[static_cast<std::size_t>(4 * c)]);
  };
  for (int k = 0; k < 20000; ++k) {
    sampler.sample(rng, w);
    prod.push_back(interp(s) * interp(t));
  }
  g.expect(within_se(prod, gaussian::cov_lin(gaussian::TimePoint(s), gaussian::TimePoint(t), n), 5.0),
           "sampled interpolant covariance disagrees with cov_lin");
}

void wick_group(Group& g, sampling::Rng& rng) {
  g.expect(wick::hermite(2, 1.0, 0.0) == -1.0, "h^2_1(0) != -1");
  g.expect(std::abs(wick::hermite(3, 0.5, 1.0) + 0.5) < 1e-15, "h^3_0.5(1) != -0.5");
  for (double x = -4.0; x <= 4.0; x += 0.5) {
    for (double var = 0.0; var <= 4.0; var += 0.5) {
      double series = 0.0;
      for (int k = 0; k <= 60; ++k) series += wick::hermite(k, var, x) / wick::factorial(k);
      if (!close(series, wick::wick_exp(x, var), 1e-9)) {
        g.expect(false, "Hermite series does not reproduce wick_exp at x=" + num(x) + ", var=" + num(var));
        return;
      }
    }
  }
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 10; ++k) {
    const double t = unif(rng);
    const double x = normal(rng);
    const double times[] = {t};
    const wick::WickValueContext ctx(gaussian::brownian_vector(times), {x});
    for (int l = 0; l <= 6; ++l) {
      g.expect(close(wick::wick_monomial_value(ctx, {l}), wick::hermite(l, t, x), 1e-12),
               "single-slot Wick monomial differs from Hermite");
    }
  }
  std::uniform_int_distribution<int> expo(0, 2);
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> ts{unif(rng), unif(rng), unif(rng)};
    std::vector<int> e1(3), e2(3);
    for (auto& e : e1) e = expo(rng);
    e2 = e1;
    std::shuffle(e2.begin(), e2.end(), rng);
    const wick::MultiIndex m1(e1), m2(e2);
    Eigen::MatrixXd cross(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) cross(i, j) = std::min(ts[static_cast<std::size_t>(i)], ts[static_cast<std::size_t>(j)]);
    }
    // expand slots with multiplicity
    std::vector<int> r, c;
    for (int i = 0; i < 3; ++i) {
      for (int q = 0; q < e1[static_cast<std::size_t>(i)]; ++q) r.push_back(i);
      for (int q = 0; q < e2[static_cast<std::size_t>(i)]; ++q) c.push_back(i);
    }
    Eigen::MatrixXd big(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        big(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cross(r[i], c[j]);
      }
    }
    g.expect(close(wick::wick_inner(m1, m2, cross), permutation_permanent(big), 1e-12),
             "wick_inner differs from the permutation sum");
  }
  // Monte Carlo: E[W_s^{<>2} W_t^{<>2}] = 2 min(s,t)^2 and E[W_s^{<>3}] = 0.
  const double s = 0.4;
  const double t = 0.9;
  const double times[] = {s, t};
  const auto gv = gaussian::brownian_vector(times);
  std::vector<double> prod, mean3;
  for (int k = 0; k < 20000; ++k) {
    const double ws = std::sqrt(s) * normal(rng);
    const double wt = ws + std::sqrt(t - s) * normal(rng);
    const wick::WickValueContext ctx(gv, {ws, wt});
    prod.push_back(wick::wick_monomial_value(ctx, {2, 0}) * wick::wick_monomial_value(ctx, {0, 2}));
    mean3.push_back(wick::wick_monomial_value(ctx, {1, 2}));
  }
  g.expect(within_se(prod, 2.0 * s * s, 5.0), "sampled E[W_s^<>2 W_t^<>2] disagrees with wick_inner");
  g.expect(within_se(mean3, 0.0, 5.0), "sampled Wick monomial has non-zero mean");
}

void s_transform_group(Group& g, sampling::Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const auto u = random_expansion(rng, 2, {unif(rng)}, 4, 3);
    for (int j = 0; j < 3; ++j) {
      const auto step = random_step_function(rng);
      const double lhs = integrator::skorohod_s_transform(u, step);
      const double rhs = integrator::s_transform_integral(u, step);
      g.expect(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)),
               "S-transform identity off by " + num(lhs - rhs));
    }
  }
}

void ito_group(Group& g, sampling::Rng& rng) {
  const integrator::EvaluationPlan plan{4, 16, integrator::Quadrature::Trapezoid};
  const double h = 1.0 / (plan.n * plan.fine_factor);
  for (int k = 0; k < 5; ++k) {
    const auto f = random_expansion(rng, 2, {0.5}, 6, 3);
    integrator::BrownianPath path;
    path.grid = integrator::fine_grid(plan.n, plan.fine_factor, f.taus());
    path.values.resize(path.grid.size());
    const sampling::PathSampler sampler(path.grid);
    for (int p = 0; p < 5; ++p) {
      sampler.sample(rng, path.values);
      const auto r = ito_residual(f, path, plan);
      g.expect(std::abs(r.lhs - r.rhs) <= 10.0 * h * h * r.scale, "Ito identity residual " + num(r.lhs - r.rhs));
    }
  }
}

void oracle_group(Group& g, std::uint64_t seed) {
  const chaos::ChaosExpansion drift(1, {}, {{chaos::Coefficient::polynomial({0.0, 1.0}), {0}}});
  const auto r = experiment::nested_mc_oracle(drift, 2, 200, 500, seed, 8);
  g.expect(std::abs(r.z) <= 5.0, "nested oracle excess z = " + num(r.z));
  const chaos::ChaosExpansion exact(2, {0.5}, {{chaos::Coefficient::constant(1.0), {1, 1}}});
  const auto e = experiment::nested_mc_oracle(exact, 2, 20, 20, seed, 8);
  g.expect(e.rms_gap <= 1e-12, "oracle gap for a Wick-analytic integrand is " + num(e.rms_gap));
}

}  // namespace

std::vector<GroupResult> validate(const ValidateOptions& options) {
  struct FaultGuard {
    explicit FaultGuard(bool on) {
      if (on) gaussian::testing::set_cov_lin_fault(1e-3);
    }
    ~FaultGuard() { gaussian::testing::set_cov_lin_fault(0.0); }
  } guard(options.corrupt_cov_lin);

  std::vector<GroupResult> out;
  auto rng_for = [&](std::uint64_t group) { return sampling::stream_rng(options.seed, 0x76616c6964ULL, group); };
  {
    auto rng = rng_for(1);
    out.push_back(Group("gaussian").run([&](Group& g) { gaussian_group(g, rng); }));
  }
  {
    auto rng = rng_for(2);
    out.push_back(Group("hermite/wick").run([&](Group& g) { wick_group(g, rng); }));
  }
  {
    auto rng = rng_for(3);
    out.push_back(Group("s-transform").run([&](Group& g) { s_transform_group(g, rng); }));
  }
  {
    auto rng = rng_for(4);
    out.push_back(Group("ito").run([&](Group& g) { ito_group(g, rng); }));
  }
  out.push_back(Group("oracle").run([&](Group& g) { oracle_group(g, options.seed); }));
  return out;
}

}  // namespace skorohod::checks
