#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "euaf/network.hpp"
#include "euaf/pointfit.hpp"

namespace euaf::approx1d {

struct Target1D {
  std::function<double(double)> evaluator;
  double a = 0.0;
  double b = 1.0;
  std::optional<int> user_K;  // overrides the empirical grid count
};

struct Approx1DReport {
  Network network;
  int K = 0;
  double M = 0.0;
  double w0 = 0.0;      // first component's winding parameter
  long long m0 = 0;
  double grid_sup_error = 0.0;
  std::string guarantee_region;
  std::vector<pointfit::FitResult> fits;  // one per assembled component
  std::vector<long long> m0s;
};

// Smallest K >= 10 whose empirical modulus of continuity on a 1e5-point
// grid satisfies mod(1/K) < epsilon/4 (the epsilon/2 oscillation condition
// with a factor-2 sampling margin).
int choose_K(const Target1D& target, double epsilon);

// Width-2 depth-3 net matching f on the even half-intervals
// [2k/2K, (2k+1)/2K], k = 0..K-1, within epsilon; nothing is claimed on
// the odd halves.  M defaults to sup|f| + 1; the winding parameter is fit
// to epsilon/(4M) within `budget` candidate evaluations.
Approx1DReport build_half_approx(const Target1D& target, int K, double epsilon,
                                 std::uint64_t budget = 1'000'000'000,
                                 std::optional<double> M_override = std::nullopt);

// Width-36 depth-5 net with |net - f| < epsilon on [0, 9/10]: four shifted
// half approximators (each at epsilon/4) glued by the bump partition and
// exact product blocks.
Approx1DReport build_region_approx(const Target1D& target, double epsilon,
                                   std::uint64_t budget = 1'000'000'000);

// Width-36 depth-5 net with |net - f| < epsilon on all of [a, b]; the
// [a,b] -> [0, 9/10] rescale is fused into the first affine layer.
Approx1DReport build_interval_approx(const Target1D& target, double epsilon,
                                     std::uint64_t budget = 1'000'000'000);

}  // namespace euaf::approx1d
