#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skorohod/chaos.hpp"
#include "skorohod/integrator.hpp"
#include "skorohod/sampling.hpp"

namespace skorohod::checks {

/// The three equivalent characterisations of exact simulability.
struct ExactVerdict {
  bool constant_coefficients = false;  // every a_l(s) is constant in s
  bool drift_vanishes = false;         // L u is the zero expansion
  bool mc_exact = false;               // Monte Carlo e_4 <= 1e-10
  double e4_hat = 0.0;

  bool agree() const { return constant_coefficients == drift_vanishes && drift_vanishes == mc_exact; }
};

ExactVerdict exact_check(const chaos::ChaosExpansion& u, std::uint64_t seed = 1);

struct ItoResidual {
  double lhs = 0.0;    // f(1, W_1, W_tau) - f(0, 0, W_tau)
  double rhs = 0.0;    // I[d/dx_1 f] + int L f dt
  double scale = 1.0;  // path-dependent magnitude for the quadrature tolerance
};

/// Both sides of the Ito formula for f along one path.
ItoResidual ito_residual(const chaos::ChaosExpansion& f, const integrator::BrownianPath& path,
                         const integrator::EvaluationPlan& plan);

/// Random expansion: 1..max_terms terms with exponents of total degree
/// <= max_degree and polynomial coefficients of degree <= max_poly_degree.
chaos::ChaosExpansion random_expansion(sampling::Rng& rng, int slots, std::vector<double> taus, int max_degree,
                                       int max_poly_degree, int max_terms = 4);

chaos::StepFunction random_step_function(sampling::Rng& rng, int max_pieces = 5);

struct GroupResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidateOptions {
  std::uint64_t seed = 1;
  bool corrupt_cov_lin = false;
};

/// Self-validation suite: gaussian, wick, s-transform, ito, oracle.
std::vector<GroupResult> validate(const ValidateOptions& options = {});

}  // namespace skorohod::checks
