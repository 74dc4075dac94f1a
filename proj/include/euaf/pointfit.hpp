#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace euaf::pointfit {

// Targets for the winding fit: find one scalar w with
// tri_wave(w / (alpha + r_k)) close to values[k] for every k.
struct FitTargets {
  std::vector<double> values;   // each in [0,1]
  double alpha = 3.141592653589793;
  std::vector<double> offsets;  // defaults to 1..K when empty

  void validate() const;
  std::vector<double> frequencies() const;  // a_k = 1 / (alpha + r_k)
};

struct FitResult {
  double w = 0.0;
  std::vector<double> per_index_error;
  double max_error = 0.0;
  std::uint64_t evaluations = 0;   // candidate points examined
  double search_bound_reached = 0.0;
  bool satisfied = false;
};

// Deterministic expanding multi-resolution sweep.  Rounds double the scan
// bound while the pitch refines to 1/64 of the smallest coordinate period;
// near-miss cells are polished by local grid refinement.  The triangular
// wave is even, so only w >= 0 is enumerated and the first satisfying
// candidate in enumeration order is returned.  On budget exhaustion the
// best candidate seen is returned with satisfied = false.
FitResult fit(const FitTargets& targets, double epsilon, std::uint64_t budget);

// m0 = floor(|w|) + 1, which makes every w/(alpha+r_k) + 2*m0 nonnegative
// while leaving the triangular-wave value unchanged.
std::pair<double, long long> shift_nonneg(const FitResult& result);

// Fraction of the 32^K uniform cells of [0,1]^K visited by the fractional
// parts (frac(w a_1), ..., frac(w a_K)) with w on a `samples`-point uniform
// grid over [0, range].  K <= 4.
double winding_coverage(int K, std::uint64_t samples, double range,
                        double alpha = 3.141592653589793,
                        const std::vector<double>& offsets = {});

}  // namespace euaf::pointfit
