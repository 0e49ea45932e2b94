#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace skorohod::sampling {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Independent stream for (seed, stream, index); used so that path i of a
/// run depends only on (seed, n, i) and never on the worker that draws it.
Rng stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Brownian motion on a fixed grid starting at 0.
class PathSampler {
 public:
  explicit PathSampler(std::span<const double> grid);
  std::size_t size() const { return sd_.size() + 1; }
  void sample(Rng& rng, std::span<double> out) const;

 private:
  std::vector<double> sd_;
};

/// Resamples W between knots given its values at the knots (Brownian bridge
/// on every knot cell, built forward point by point).
class BridgeSampler {
 public:
  BridgeSampler(std::span<const double> grid, std::span<const std::size_t> knot_indices);
  /// `path` holds the knot values on entry; every other point is overwritten.
  void resample(Rng& rng, std::span<double> path) const;

 private:
  std::vector<std::size_t> knots_;
  std::vector<double> pull_;
  std::vector<double> sd_;
};

}  // namespace skorohod::sampling
