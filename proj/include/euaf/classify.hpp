#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "euaf/network.hpp"

namespace euaf::classify {

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return double(num) / double(den); }
};

// d = 1 regions as interval unions with rational labels.
struct LabeledRegions {
  std::vector<std::vector<std::array<double, 2>>> regions;
  std::vector<Rational> labels;
  double box_lo = 0.0;
  double box_hi = 1.0;

  void validate() const;  // disjointness (gap > 1e-9), nonzero denominators
};

// Point-cloud regions in R^d, used by the multi-dimensional extension.
struct LabeledPointClouds {
  std::vector<std::vector<std::vector<double>>> clouds;
  std::vector<Rational> labels;

  void validate() const;
};

// Continuous g with g = r_j on region j, built from distance ratios
// g_j = dist(x, E \ E_j) / (dist(x, E_j) + dist(x, E \ E_j)).
std::function<double(double)> continuous_extension(const LabeledRegions& regions);
std::function<double(const std::vector<double>&)> continuous_extension_nd(
    const LabeledPointClouds& clouds);

// n1 = lcm of label denominators; n2 makes every n1*r_j + n2 a positive
// integer and n1*g + n2 nonnegative given g's range [lo, hi].
std::pair<long long, long long> choose_integers(const std::vector<Rational>& labels,
                                                double lo, double hi);

struct ClassifyReport {
  Network network;
  long long n1 = 0;
  long long n2 = 0;
  std::size_t verified_points = 0;
  double max_deviation_on_samples = 0.0;
  double phi1_max_error = 0.0;  // worst |phi1 - target odd integer| on samples
};

// Exact representer of sum_j r_j 1_{E_j} on the union of the regions:
// width 36d(2d+1), depth 12 for d = 1.  The pre-snap stage realizes a
// piecewise-linear interpolant that hits each region's odd integer exactly,
// so the plateau rounding makes the labels exact.
ClassifyReport build_classifier(const LabeledRegions& regions,
                                std::uint64_t budget = 1'000'000'000);

}  // namespace euaf::classify
