#include "skorohod/sampling.hpp"

#include <cmath>

#include "skorohod/errors.hpp"

namespace skorohod::sampling {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t h = mix64(mix64(mix64(seed) ^ stream) ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

PathSampler::PathSampler(std::span<const double> grid) {
  if (grid.size() < 2 || grid.front() != 0.0) throw DomainError("path grid must start at 0 and have two points");
  sd_.resize(grid.size() - 1);
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double h = grid[j + 1] - grid[j];
    if (!(h > 0.0)) throw DomainError("path grid must increase strictly");
    sd_[j] = std::sqrt(h);
  }
}

void PathSampler::sample(Rng& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  out[0] = 0.0;
  for (std::size_t j = 0; j < sd_.size(); ++j) out[j + 1] = out[j] + sd_[j] * normal(rng);
}

BridgeSampler::BridgeSampler(std::span<const double> grid, std::span<const std::size_t> knot_indices)
    : knots_(knot_indices.begin(), knot_indices.end()), pull_(grid.size(), 0.0), sd_(grid.size(), 0.0) {
  if (knots_.size() < 2 || knots_.front() != 0 || knots_.back() + 1 != grid.size()) {
    throw DomainError("bridge knots must include both ends of the grid");
  }
  for (std::size_t c = 0; c + 1 < knots_.size(); ++c) {
    const double end = grid[knots_[c + 1]];
    for (std::size_t j = knots_[c] + 1; j < knots_[c + 1]; ++j) {
      const double dt = grid[j] - grid[j - 1];
      const double rest = end - grid[j - 1];
      pull_[j] = dt / rest;
      sd_[j] = std::sqrt(dt * (end - grid[j]) / rest);
    }
  }
}

void BridgeSampler::resample(Rng& rng, std::span<double> path) const {
  std::normal_distribution<double> normal;
  for (std::size_t c = 0; c + 1 < knots_.size(); ++c) {
    const double target = path[knots_[c + 1]];
    for (std::size_t j = knots_[c] + 1; j < knots_[c + 1]; ++j) {
      path[j] = path[j - 1] + pull_[j] * (target - path[j - 1]) + sd_[j] * normal(rng);
    }
  }
}

}  // namespace skorohod::sampling
