#include "skorohod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "skorohod/errors.hpp"

namespace skorohod::quadrature {

namespace {

GaussLegendre build_rule(int order) {
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_order from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = order == 1 ? x : p1;
      const double pnm1 = order == 1 ? 1.0 : p0;
      dp = order * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1 || order > 128) throw DomainError("Gauss-Legendre order must be in 1..128");
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int order) {
  const GaussLegendre& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

double integrate_segments(const std::function<double(double)>& f, std::span<const double> breakpoints, int order,
                          int panels) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k];
    const double h = (breakpoints[k + 1] - a) / panels;
    for (int p = 0; p < panels; ++p) total += integrate(f, a + p * h, a + (p + 1) * h, order);
  }
  return total;
}

double integrate_checked(const std::function<double(double)>& f, std::span<const double> breakpoints,
                         double rel_tol) {
  double gap = 0.0;
  double fine = 0.0;
  for (int panels = 1; panels <= 256; panels *= 2) {
    const double coarse = integrate_segments(f, breakpoints, 8, panels);
    fine = integrate_segments(f, breakpoints, 16, panels);
    gap = std::abs(fine - coarse);
    if (gap <= rel_tol * std::max(1.0, std::abs(fine))) return fine;
  }
  if (gap > 1e-10 * std::max(1.0, std::abs(fine))) {
    throw ConsistencyError("quadrature self-check failed: order-8 and order-16 rules differ by " +
                           std::to_string(gap));
  }
  return fine;
}

double integrate_lower_triangle(const std::function<double(double, double)>& g, double a, double b, int order) {
  const GaussLegendre& rule = gauss_legendre(order);
  const double h = b - a;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = 0.5 * (rule.nodes[i] + 1.0);
    const double wu = 0.5 * rule.weights[i];
    const double x = a + h * u;
    double inner = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double v = 0.5 * (rule.nodes[j] + 1.0);
      inner += 0.5 * rule.weights[j] * g(x, a + h * u * v);
    }
    sum += wu * u * inner;
  }
  return sum * h * h;
}

std::vector<double> segment_breakpoints(std::span<const double> cuts) {
  std::vector<double> bp{0.0, 1.0};
  for (double c : cuts) {
    if (c > 0.0 && c < 1.0) bp.push_back(c);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

}  // namespace skorohod::quadrature
