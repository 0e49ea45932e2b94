#pragma once

#include <functional>
#include <span>
#include <vector>

namespace skorohod::quadrature {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (exact for polynomials of degree 2*order-1).
const GaussLegendre& gauss_legendre(int order);

double integrate(const std::function<double(double)>& f, double a, double b, int order);

/// Composite rule: every segment [b_k, b_{k+1}] split into `panels` equal panels.
double integrate_segments(const std::function<double(double)>& f, std::span<const double> breakpoints,
                          int order, int panels = 1);

/// Composite order-8 rule over the segments, refined by doubling the panel
/// count until the order-16 rule agrees to `rel_tol`. Throws ConsistencyError
/// if the two orders never agree to 1e-10 (relative to max(1, |value|)).
double integrate_checked(const std::function<double(double)>& f, std::span<const double> breakpoints,
                         double rel_tol = 1e-13);

/// Integral over the triangle {a <= y <= x <= b} of g(x, y), by the collapsed
/// map x = a + h u, y = a + h u v. Exact for polynomial g of total degree
/// up to 2*order-2.
double integrate_lower_triangle(const std::function<double(double, double)>& g, double a, double b, int order);

/// Sorted, de-duplicated breakpoints of [0,1] including every interior cut.
std::vector<double> segment_breakpoints(std::span<const double> cuts);

}  // namespace skorohod::quadrature
