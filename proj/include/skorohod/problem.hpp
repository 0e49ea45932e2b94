#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skorohod/chaos.hpp"

namespace skorohod::problem {

inline constexpr int kDefaultTruncation = 9;

struct Problem {
  std::string name;
  chaos::ChaosExpansion expansion;
  /// Set for truncated infinite expansions: bound on int E[(L u - L u_M)^2] ds.
  std::optional<double> drift_tail_bound;
};

/// Bound on |C(u) - C(u_M)| implied by the drift tail bound.
double constant_tail(const Problem& p);

const std::vector<std::string>& builtin_names();
Problem builtin(std::string_view name, int truncation = kDefaultTruncation);

/// Problem document:
///   {"K": 2, "taus": [0.5],
///    "terms": [{"coeff": {"kind": "polynomial", "data": [0, 1]}, "exponents": [0, 1]}, ...]}
/// or {"builtin": "sine", "truncation": 9}. An "exppoly" coefficient carries
/// {"prefactor": PP, "exponent": PP} with PP = {"breakpoints": [...], "pieces": [[...], ...]}.
/// Errors are ParseError with a line:column or a field path.
Problem parse(std::string_view text, int truncation = kDefaultTruncation);
Problem load_file(const std::string& path, int truncation = kDefaultTruncation);

/// Canonical document for an expansion; doubles are written in shortest
/// round-trip form. UserPair coefficients cannot be written.
std::string serialize(const chaos::ChaosExpansion& u);

}  // namespace skorohod::problem
