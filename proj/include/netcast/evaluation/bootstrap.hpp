#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "netcast/errors.hpp"

namespace netcast {

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Percentile interval of bootstrap-resampled means.
inline std::pair<double, double> bootstrap_ci(std::span<const double> values, int replicates = 10000,
                                              std::uint64_t seed = 0, double level = 0.95) {
  if (values.size() < 2) throw ArgumentError("bootstrap needs at least two values");
  if (replicates < 1) throw ArgumentError("bootstrap needs at least one replicate");
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level outside (0,1)");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> means(static_cast<std::size_t>(replicates));
  // Offsets from the first value keep constant samples exact.
  const double anchor = values[0];
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) s += values[pick(rng)] - anchor;
    m = anchor + s / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
}

}  // namespace netcast
