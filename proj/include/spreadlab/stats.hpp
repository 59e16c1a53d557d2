#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace spreadlab {

inline double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw ComputeError("mean of empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Population standard deviation (divides by n, not n-1).
inline double stddev_pop(const std::vector<double>& xs) {
  double m = mean_of(xs);
  double acc = 0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

/// Quantile with linear interpolation between order statistics
/// (the "linear" / type-7 definition). q in [0, 1].
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ComputeError("quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw ComputeError("quantile fraction outside [0,1]");
  std::sort(xs.begin(), xs.end());
  if (xs.size() == 1) return xs[0];
  double pos = q * static_cast<double>(xs.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  if (lo >= xs.size() - 1) return xs.back();
  double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

inline double percentile95(const std::vector<double>& xs) { return quantile(xs, 0.95); }

inline double median_of(const std::vector<double>& xs) { return quantile(xs, 0.5); }

inline double max_of(const std::vector<double>& xs) {
  if (xs.empty()) throw ComputeError("max of empty sample");
  return *std::max_element(xs.begin(), xs.end());
}

}  // namespace spreadlab
