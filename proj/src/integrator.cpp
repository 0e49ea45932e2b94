#include "skorohod/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skorohod/errors.hpp"
#include "skorohod/quadrature.hpp"

namespace skorohod::integrator {

void EvaluationPlan::validate() const {
  if (n < 1) throw DomainError("coarse resolution n must be positive");
  if (fine_factor < 2) throw DomainError("fine factor must be at least 2");
  if (static_cast<long long>(n) * fine_factor > (1LL << 26)) throw CapacityError("fine grid too large");
}

std::vector<double> fine_grid(int n, int fine_factor, std::span<const double> taus) {
  const long long cells = static_cast<long long>(n) * fine_factor;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(cells) + 1 + taus.size());
  for (long long k = 0; k <= cells; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(cells));
  for (double t : taus) {
    gaussian::TimePoint checked(t);
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    const bool near_right = it != grid.end() && std::abs(*it - t) <= 1e-13;
    const bool near_left = it != grid.begin() && std::abs(*(it - 1) - t) <= 1e-13;
    if (!near_right && !near_left) grid.insert(it, t);
  }
  return grid;
}

std::vector<double> quadrature_weights(std::span<const double> grid, Quadrature q) {
  const std::size_t m = grid.size();
  std::vector<double> w(m, 0.0);
  if (m < 2) return w;
  if (q == Quadrature::Trapezoid) {
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double h = grid[j + 1] - grid[j];
      w[j] += 0.5 * h;
      w[j + 1] += 0.5 * h;
    }
    return w;
  }
  // Simpson on consecutive cell pairs (non-uniform form), trapezoid on a leftover cell.
  std::size_t j = 0;
  for (; j + 2 < m; j += 2) {
    const double h1 = grid[j + 1] - grid[j];
    const double h2 = grid[j + 2] - grid[j + 1];
    const double sum = h1 + h2;
    w[j] += sum / 6.0 * (2.0 - h2 / h1);
    w[j + 1] += sum * sum * sum / (6.0 * h1 * h2);
    w[j + 2] += sum / 6.0 * (2.0 - h1 / h2);
  }
  if (j + 1 < m) {
    const double h = grid[j + 1] - grid[j];
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  return w;
}

std::size_t grid_index(std::span<const double> grid, double t) {
  auto it = std::lower_bound(grid.begin(), grid.end(), t - 1e-13);
  if (it == grid.end() || std::abs(*it - t) > 1e-13) {
    throw DomainError("time " + std::to_string(t) + " is not a point of the evaluation grid");
  }
  return static_cast<std::size_t>(it - grid.begin());
}

// ---------------------------------------------------------------------------

PreparedIntegrand::PreparedIntegrand(const chaos::ChaosExpansion& u, const EvaluationPlan& plan)
    : plan_(plan), slots_(u.slots()) {
  plan_.validate();
  const auto taus = u.taus();
  const std::size_t k = static_cast<std::size_t>(slots_);
  grid_ = fine_grid(plan_.n, plan_.fine_factor, taus);
  knots_ = gaussian::KnotSet::equidistant(plan_.n, taus);
  for (double kn : knots_.knots()) knot_idx_.push_back(grid_index(grid_, kn));
  for (double t : taus) tau_idx_.push_back(grid_index(grid_, t));

  box_.assign(k, 0);
  std::vector<wick::MultiIndex> lifted;
  for (const auto& term : u.terms()) {
    lifted.push_back(term.mi.with_slot(0, term.mi[0] + 1));
    for (std::size_t i = 0; i < k; ++i) box_[i] = std::max(box_[i], lifted.back()[i]);
    max_total_ = std::max(max_total_, lifted.back().total_degree());
  }
  const wick::WickTable shape(box_, max_total_);

  auto frozen_cov = [&](double s, double s_var, std::vector<double>& out, bool lin) {
    out[0] = s_var;
    for (std::size_t i = 1; i < k; ++i) {
      const double c = lin ? knots_.cov_lin(s, taus[i - 1]) : std::min(s, taus[i - 1]);
      out[i] = c;
      out[i * k] = c;
      for (std::size_t j = 1; j < k; ++j) out[i * k + j] = std::min(taus[i - 1], taus[j - 1]);
    }
  };

  cov_one_.assign(k * k, 0.0);
  frozen_cov(1.0, 1.0, cov_one_, false);
  for (std::size_t t = 0; t < u.terms().size(); ++t) {
    const auto& term = u.terms()[t];
    const double c = term.coeff.value(1.0) / (term.mi[0] + 1);
    if (c == 0.0) continue;
    term_offsets_.push_back(shape.offset(lifted[t].exponents()));
    term_coeffs_.push_back(c);
  }

  std::vector<chaos::Coefficient> derivs;
  std::vector<double> scale;
  for (std::size_t t = 0; t < u.terms().size(); ++t) {
    const auto& term = u.terms()[t];
    auto d = term.coeff.derivative();
    if (d.is_zero()) continue;
    derivs.push_back(std::move(d));
    scale.push_back(1.0 / (term.mi[0] + 1));
    drift_offsets_.push_back(shape.offset(lifted[t].exponents()));
  }

  const std::size_t m = grid_.size();
  const std::size_t nd = derivs.size();
  const auto weights = quadrature_weights(grid_, plan_.quadrature);
  drift_coeffs_.assign(m * nd, 0.0);
  cov_exact_.assign(m * k * k, 0.0);
  cov_lin_.assign(m * k * k, 0.0);
  lin_left_.resize(m);
  lin_right_.resize(m);
  lin_weight_.resize(m);
  on_knot_.resize(m);
  std::vector<double> buf(k * k);
  for (std::size_t j = 0; j < m; ++j) {
    const double s = grid_[j];
    bool any = false;
    for (std::size_t t = 0; t < nd; ++t) {
      const double c = weights[j] * derivs[t].value(s) * scale[t];
      drift_coeffs_[j * nd + t] = c;
      any = any || c != 0.0;
    }
    if (any) active_.push_back(j);

    frozen_cov(s, s, buf, false);
    std::copy(buf.begin(), buf.end(), cov_exact_.begin() + static_cast<std::ptrdiff_t>(j * k * k));
    frozen_cov(s, knots_.cov_lin(s, s), buf, true);
    std::copy(buf.begin(), buf.end(), cov_lin_.begin() + static_cast<std::ptrdiff_t>(j * k * k));

    const std::size_t c = knots_.cell(s);
    const double a = knots_.knots()[c];
    const double b = knots_.knots()[c + 1];
    lin_left_[j] = knot_idx_[c];
    lin_right_[j] = knot_idx_[c + 1];
    lin_weight_[j] = (s - a) / (b - a);
    on_knot_[j] = (j == lin_left_[j] || j == lin_right_[j]) ? 1 : 0;
  }
}

PreparedIntegrand::Workspace PreparedIntegrand::make_workspace() const {
  return {wick::WickTable(box_, max_total_), std::vector<double>(static_cast<std::size_t>(slots_), 0.0)};
}

void PreparedIntegrand::load_frozen(std::span<const double> w, Workspace& ws) const {
  if (w.size() != grid_.size()) throw DomainError("path does not match the evaluation grid");
  for (std::size_t i = 0; i < tau_idx_.size(); ++i) ws.x[i + 1] = w[tau_idx_[i]];
}

double PreparedIntegrand::terminal(std::span<const double> w, Workspace& ws) const {
  if (term_offsets_.empty()) return 0.0;
  ws.x[0] = w.back();
  ws.table.evaluate(cov_one_, ws.x);
  double acc = 0.0;
  for (std::size_t t = 0; t < term_offsets_.size(); ++t) acc += term_coeffs_[t] * ws.table.at(term_offsets_[t]);
  return acc;
}

double PreparedIntegrand::drift_at(std::size_t j, std::span<const double> cov, double x0, Workspace& ws) const {
  ws.x[0] = x0;
  ws.table.evaluate(cov, ws.x);
  const std::size_t nd = drift_offsets_.size();
  const double* c = drift_coeffs_.data() + j * nd;
  double acc = 0.0;
  for (std::size_t t = 0; t < nd; ++t) acc += c[t] * ws.table.at(drift_offsets_[t]);
  return acc;
}

PreparedIntegrand::Values PreparedIntegrand::evaluate(std::span<const double> w, Workspace& ws) const {
  load_frozen(w, ws);
  const std::size_t kk = static_cast<std::size_t>(slots_ * slots_);
  const double term = terminal(w, ws);
  double exact = 0.0;
  double lin = 0.0;
  for (std::size_t j : active_) {
    const double de = drift_at(j, std::span(cov_exact_).subspan(j * kk, kk), w[j], ws);
    exact += de;
    if (on_knot_[j]) {
      lin += de;
    } else {
      const double x = w[lin_left_[j]] + lin_weight_[j] * (w[lin_right_[j]] - w[lin_left_[j]]);
      lin += drift_at(j, std::span(cov_lin_).subspan(j * kk, kk), x, ws);
    }
  }
  return {term - exact, term - lin};
}

double PreparedIntegrand::skorohod(std::span<const double> w, Workspace& ws) const {
  load_frozen(w, ws);
  const std::size_t kk = static_cast<std::size_t>(slots_ * slots_);
  double exact = 0.0;
  for (std::size_t j : active_) exact += drift_at(j, std::span(cov_exact_).subspan(j * kk, kk), w[j], ws);
  return terminal(w, ws) - exact;
}

double PreparedIntegrand::error(std::span<const double> w, Workspace& ws) const {
  load_frozen(w, ws);
  const std::size_t kk = static_cast<std::size_t>(slots_ * slots_);
  double diff = 0.0;
  for (std::size_t j : active_) {
    if (on_knot_[j]) continue;
    const double x = w[lin_left_[j]] + lin_weight_[j] * (w[lin_right_[j]] - w[lin_left_[j]]);
    diff += drift_at(j, std::span(cov_lin_).subspan(j * kk, kk), x, ws) -
            drift_at(j, std::span(cov_exact_).subspan(j * kk, kk), w[j], ws);
  }
  return diff;
}

// ---------------------------------------------------------------------------

namespace {

void check_grid(const PreparedIntegrand& prep, const BrownianPath& path) {
  const auto g = prep.grid();
  if (path.grid.size() != g.size() || path.values.size() != g.size()) {
    throw DomainError("path grid has " + std::to_string(path.grid.size()) + " points, the plan needs " +
                      std::to_string(g.size()));
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(path.grid[j] - g[j]) > 1e-13) throw DomainError("path grid does not match the plan's grid");
  }
}

}  // namespace

double skorohod_pathwise(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan) {
  const PreparedIntegrand prep(u, plan);
  check_grid(prep, path);
  auto ws = prep.make_workspace();
  return prep.skorohod(path.values, ws);
}

double conditional_pathwise(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan) {
  const PreparedIntegrand prep(u, plan);
  check_grid(prep, path);
  auto ws = prep.make_workspace();
  return prep.evaluate(path.values, ws).conditional;
}

double error_sample(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan) {
  const PreparedIntegrand prep(u, plan);
  check_grid(prep, path);
  auto ws = prep.make_workspace();
  const double e = prep.error(path.values, ws);
  return e * e;
}

double time_integral_pathwise(const chaos::ChaosExpansion& u, const BrownianPath& path, const EvaluationPlan& plan) {
  plan.validate();
  const auto grid = fine_grid(plan.n, plan.fine_factor, u.taus());
  if (path.grid.size() != grid.size() || path.values.size() != grid.size()) {
    throw DomainError("path does not match the evaluation grid");
  }
  if (u.empty()) return 0.0;
  const auto weights = quadrature_weights(grid, plan.quadrature);
  const auto taus = u.taus();
  const std::size_t k = static_cast<std::size_t>(u.slots());
  std::vector<int> box(k, 0);
  for (const auto& term : u.terms()) {
    for (std::size_t i = 0; i < k; ++i) box[i] = std::max(box[i], term.mi[i]);
  }
  wick::WickTable table(box, u.max_degree());
  std::vector<std::size_t> offsets;
  for (const auto& term : u.terms()) offsets.push_back(table.offset(term.mi.exponents()));
  std::vector<double> x(k, 0.0);
  for (std::size_t i = 1; i < k; ++i) x[i] = path.values[grid_index(grid, taus[i - 1])];
  std::vector<double> cov(k * k);
  for (std::size_t i = 1; i < k; ++i) {
    for (std::size_t j = 1; j < k; ++j) cov[i * k + j] = std::min(taus[i - 1], taus[j - 1]);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double s = grid[j];
    cov[0] = s;
    for (std::size_t i = 1; i < k; ++i) cov[i] = cov[i * k] = std::min(s, taus[i - 1]);
    x[0] = path.values[j];
    table.evaluate(cov, x);
    double v = 0.0;
    for (std::size_t t = 0; t < offsets.size(); ++t) v += u.terms()[t].coeff.value(s) * table.at(offsets[t]);
    total += weights[j] * v;
  }
  return total;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> s_breakpoints(const chaos::ChaosExpansion& u, const chaos::StepFunction& g) {
  std::vector<double> cuts = u.kinks();
  for (double b : g.breakpoints()) cuts.push_back(b);
  return quadrature::segment_breakpoints(cuts);
}

}  // namespace

double skorohod_s_transform(const chaos::ChaosExpansion& u, const chaos::StepFunction& g) {
  const auto bp = s_breakpoints(u, g);
  const auto taus = u.taus();
  const double g1 = g.antiderivative(1.0);
  double total = 0.0;
  for (const auto& term : u.terms()) {
    double frozen = 1.0;
    for (std::size_t i = 1; i < term.mi.size(); ++i) frozen *= std::pow(g.antiderivative(taus[i - 1]), term.mi[i]);
    const int p = term.mi[0] + 1;
    const auto d = term.coeff.derivative();
    const double drift = quadrature::integrate_segments(
        [&](double s) { return d.value(s) * std::pow(g.antiderivative(s), p); }, bp, 16, 4);
    total += frozen / p * (term.coeff.value(1.0) * std::pow(g1, p) - drift);
  }
  return total;
}

double s_transform_integral(const chaos::ChaosExpansion& u, const chaos::StepFunction& g) {
  const auto bp = s_breakpoints(u, g);
  return quadrature::integrate_segments([&](double s) { return chaos::s_transform(u, g, s) * g(s); }, bp, 16, 4);
}

}  // namespace skorohod::integrator
