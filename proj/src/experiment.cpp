#include "skorohod/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "skorohod/errors.hpp"
#include "skorohod/gaussian.hpp"
#include "skorohod/quadrature.hpp"
#include "skorohod/sampling.hpp"

namespace skorohod::experiment {

namespace {

// Neumaier's compensated sum.
class Sum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Runs body(begin, end) on contiguous index blocks; rethrows the first failure.
template <typename Body>
void parallel_blocks(std::int64_t count, int workers, Body body) {
  workers = std::max(1, workers);
  if (workers == 1 || count < 2) {
    body(std::int64_t{0}, count);
    return;
  }
  const auto w = static_cast<std::int64_t>(std::min<std::int64_t>(workers, count));
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex mu;
  for (std::int64_t k = 0; k < w; ++k) {
    const std::int64_t begin = count * k / w;
    const std::int64_t end = count * (k + 1) / w;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

void require_positive_count(std::int64_t v, const char* what) {
  if (v < 1) throw DomainError(std::string(what) + " must be positive");
}

// Integral over the square [a,b]^2 of a symmetric g(s, s'), smooth off the
// diagonal: twice the lower triangle.
double symmetric_cell_integral(const std::function<double(double, double)>& g, double a, double b, int order) {
  return 2.0 * quadrature::integrate_lower_triangle(g, a, b, order);
}

}  // namespace

ConstantResult constant_C(const chaos::ChaosExpansion& u) {
  const auto lu = chaos::apply_L(u);
  if (lu.empty()) return {0.0, 0.0};
  const auto bp = quadrature::segment_breakpoints(u.kinks());
  const double energy = quadrature::integrate_checked([&](double s) { return chaos::second_moment(lu, s); }, bp);
  return {energy, std::sqrt(std::max(0.0, energy) / 12.0)};
}

Fn2Result analytic_fn2(const chaos::ChaosExpansion& u, int n, int order) {
  if (n < 1) throw DomainError("n must be positive");
  const auto knots = gaussian::KnotSet::equidistant(n);
  for (double t : u.taus()) {
    if (!knots.on_coarse_grid(t)) {
      throw UnsupportedError("analytic f_n needs every tau on the grid i/" + std::to_string(n) + "; tau = " +
                             std::to_string(t) + " is not");
    }
  }
  const auto lu = chaos::apply_L(u);
  if (lu.empty()) return {};
  const auto dlu = chaos::apply_dx(lu, 0);
  Fn2Result r;
  for (int i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / n;
    const double b = static_cast<double>(i + 1) / n;
    // y <= x inside one cell: E[B_x B_y] = y - a - (x - a)(y - a) n
    auto bb = [&](double x, double y) { return y - a - (x - a) * (y - a) * n; };
    r.x1 += symmetric_cell_integral([&](double x, double y) { return bb(x, y) * chaos::cross_moment(lu, x, lu, y); },
                                    a, b, order);
    if (!dlu.empty()) {
      r.x2 += symmetric_cell_integral(
          [&](double x, double y) {
            const double c = bb(x, y);
            return c * c * chaos::cross_moment(dlu, x, dlu, y);
          },
          a, b, order);
    }
  }
  return r;
}

double analytic_en2(const chaos::ChaosExpansion& u, int n, int order) {
  if (n < 1) throw DomainError("n must be positive");
  const auto knots = gaussian::KnotSet::equidistant(n, u.taus());
  const auto taus = u.taus();
  const std::size_t k = static_cast<std::size_t>(u.slots());

  struct Lifted {
    chaos::Coefficient deriv;
    double scale;
    wick::MultiIndex mi;
  };
  std::vector<Lifted> terms;
  for (const auto& t : u.terms()) {
    auto d = t.coeff.derivative();
    if (d.is_zero()) continue;
    terms.push_back({std::move(d), 1.0 / (t.mi[0] + 1), t.mi.with_slot(0, t.mi[0] + 1)});
  }
  if (terms.empty()) return 0.0;

  // Only the (0,0) entry of the cross covariance differs between the W and
  // W^lin versions of the dynamic slot, so the four cross terms collapse to
  // P(min(s,s')) - P(cov_lin(s,s')).
  Eigen::MatrixXd cross(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  std::vector<double> cs(terms.size());
  std::vector<double> ct(terms.size());
  auto g = [&](double x, double y) {
    for (std::size_t i = 1; i < k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      cross(ii, 0) = std::min(taus[i - 1], y);
      cross(0, ii) = std::min(x, taus[i - 1]);
      for (std::size_t j = 1; j < k; ++j) cross(ii, static_cast<Eigen::Index>(j)) = std::min(taus[i - 1], taus[j - 1]);
    }
    for (std::size_t t = 0; t < terms.size(); ++t) {
      cs[t] = terms[t].scale * terms[t].deriv.value(x);
      ct[t] = terms[t].scale * terms[t].deriv.value(y);
    }
    const double exact = std::min(x, y);
    const double lin = knots.cov_lin(x, y);
    double total = 0.0;
    for (std::size_t p = 0; p < terms.size(); ++p) {
      for (std::size_t q = 0; q < terms.size(); ++q) {
        if (terms[p].mi.total_degree() != terms[q].mi.total_degree()) continue;
        cross(0, 0) = exact;
        const double pe = wick::wick_inner(terms[p].mi, terms[q].mi, cross);
        cross(0, 0) = lin;
        const double pl = wick::wick_inner(terms[p].mi, terms[q].mi, cross);
        total += cs[p] * ct[q] * (pe - pl);
      }
    }
    return total;
  };
  double acc = 0.0;
  const auto kn = knots.knots();
  for (std::size_t c = 0; c + 1 < kn.size(); ++c) acc += symmetric_cell_integral(g, kn[c], kn[c + 1], order);
  return acc;
}

// ---------------------------------------------------------------------------

McResult mc_error(const chaos::ChaosExpansion& u, const integrator::EvaluationPlan& plan, std::int64_t paths,
                  std::uint64_t seed, int workers) {
  require_positive_count(paths, "path count");
  const integrator::PreparedIntegrand prep(u, plan);
  const sampling::PathSampler sampler(prep.grid());
  std::vector<double> sq(static_cast<std::size_t>(paths));
  parallel_blocks(paths, workers, [&](std::int64_t begin, std::int64_t end) {
    auto ws = prep.make_workspace();
    std::vector<double> w(prep.grid().size());
    for (std::int64_t i = begin; i < end; ++i) {
      auto rng = sampling::stream_rng(seed, static_cast<std::uint64_t>(plan.n), static_cast<std::uint64_t>(i));
      sampler.sample(rng, w);
      const double e = prep.error(w, ws);
      sq[static_cast<std::size_t>(i)] = e * e;
    }
  });
  Sum s1;
  for (double v : sq) s1.add(v);
  const double mean = s1.value() / static_cast<double>(paths);
  Sum s2;
  for (double v : sq) s2.add((v - mean) * (v - mean));
  const double var = paths > 1 ? s2.value() / static_cast<double>(paths - 1) : 0.0;
  McResult r;
  r.paths = paths;
  r.e2_hat = mean;
  r.e2_stderr = std::sqrt(var / static_cast<double>(paths));
  r.e_hat = std::sqrt(mean);
  r.e_stderr = mean > 0.0 ? r.e2_stderr / (2.0 * r.e_hat) : 0.0;
  return r;
}

OracleResult nested_mc_oracle(const chaos::ChaosExpansion& u, int n, std::int64_t outer, std::int64_t inner,
                              std::uint64_t seed, int fine_factor, int workers) {
  require_positive_count(outer, "outer path count");
  require_positive_count(inner, "inner path count");
  const integrator::PreparedIntegrand prep(u, {n, fine_factor, integrator::Quadrature::Trapezoid});
  const sampling::PathSampler sampler(prep.grid());
  const sampling::BridgeSampler bridge(prep.grid(), prep.knot_indices());
  constexpr std::uint64_t kOracleStream = 0x6f7261636c65ULL;
  std::vector<double> gap2(static_cast<std::size_t>(outer));
  std::vector<double> noise(static_cast<std::size_t>(outer));
  parallel_blocks(outer, workers, [&](std::int64_t begin, std::int64_t end) {
    auto ws = prep.make_workspace();
    std::vector<double> w(prep.grid().size());
    std::vector<double> buf(w.size());
    for (std::int64_t o = begin; o < end; ++o) {
      auto rng = sampling::stream_rng(seed, kOracleStream ^ static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(o));
      sampler.sample(rng, w);
      const double closed = prep.evaluate(w, ws).conditional;
      buf = w;
      // Welford over the inner sample, centred at the closed form for stability.
      double mean = 0.0;
      double m2 = 0.0;
      for (std::int64_t k = 0; k < inner; ++k) {
        bridge.resample(rng, buf);
        const double x = prep.skorohod(buf, ws) - closed;
        const double delta = x - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (x - mean);
      }
      gap2[static_cast<std::size_t>(o)] = mean * mean;
      noise[static_cast<std::size_t>(o)] =
          inner > 1 ? m2 / static_cast<double>(inner - 1) / static_cast<double>(inner) : 0.0;
    }
  });
  Sum g, v, d;
  for (std::size_t o = 0; o < gap2.size(); ++o) {
    g.add(gap2[o]);
    v.add(noise[o]);
    d.add(gap2[o] - noise[o]);
  }
  const double count = static_cast<double>(outer);
  OracleResult r;
  r.rms_gap = std::sqrt(g.value() / count);
  r.inner_noise = std::sqrt(v.value() / count);
  if (inner < 2) {
    r.excess = r.excess_stderr = r.z = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.excess = d.value() / count;
  Sum dv;
  for (std::size_t o = 0; o < gap2.size(); ++o) {
    const double x = gap2[o] - noise[o] - r.excess;
    dv.add(x * x);
  }
  r.excess_stderr = outer > 1 ? std::sqrt(dv.value() / (count - 1.0) / count) : 0.0;
  r.z = r.excess_stderr > 0.0 ? r.excess / r.excess_stderr : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = std::min(x.size(), y.size());
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

ErrorReport rate_study(const chaos::ChaosExpansion& u, const RateStudyConfig& cfg) {
  if (cfg.n_list.empty()) throw DomainError("rate study needs at least one n");
  if (!std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()) ||
      std::adjacent_find(cfg.n_list.begin(), cfg.n_list.end()) != cfg.n_list.end()) {
    throw DomainError("n list must be strictly ascending");
  }
  if (cfg.paths < 100) throw DomainError("rate study needs at least 100 paths per n");
  ErrorReport report;
  report.C = constant_C(u).C;
  std::vector<double> xs;
  std::vector<double> ys;
  bool all_positive = true;
  for (int n : cfg.n_list) {
    ErrorRow row;
    row.n = n;
    row.mc = mc_error(u, {n, cfg.fine_factor, cfg.quadrature}, cfg.paths, cfg.seed, cfg.workers);
    row.n_times_e = n * row.mc.e_hat;
    try {
      row.f_n = std::sqrt(std::max(0.0, analytic_fn2(u, n).total()));
    } catch (const UnsupportedError&) {
      // off-grid tau for this n: no analytic value
    }
    all_positive = all_positive && row.mc.e_hat > kExactThreshold;
    xs.push_back(n);
    ys.push_back(row.mc.e_hat);
    if (all_positive) row.slope_running = log_log_slope(xs, ys);
    report.rows.push_back(row);
  }
  if (all_positive && xs.size() >= 2) {
    report.slope = log_log_slope(xs, ys);
    report.slope_fitted = true;
  }
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const ErrorReport& report, std::ostream& out) {
  out << "n,paths,e_n_hat,e_n_stderr,n_times_e_n,C_analytic,f_n_analytic,slope_running\n";
  for (const auto& row : report.rows) {
    out << row.n << ',' << row.mc.paths << ',' << fmt(row.mc.e_hat) << ',' << fmt(row.mc.e_stderr) << ','
        << fmt(row.n_times_e) << ',' << fmt(report.C) << ',' << fmt(row.f_n) << ',' << fmt(row.slope_running)
        << '\n';
  }
}

}  // namespace skorohod::experiment
