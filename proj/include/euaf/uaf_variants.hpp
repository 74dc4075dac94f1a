#pragma once

#include <functional>

#include "euaf/activation.hpp"
#include "euaf/network.hpp"

namespace euaf::uaf {

// Normalizing constant of the sigmoidal variant,
//   c = 1 / (2 * integral_0^inf sigma(t)/(2t+1)^2 dt),
// computed from exact per-unit-interval antiderivatives plus an analytic
// midline tail correction.  `segments` unit intervals are summed; the
// truncation remainder is bounded by 1/(8*(2*segments+1)^2).
double compute_c(long segments = 1 << 18);

// Sigmoidal variant: softsign branch for x <= 0, the normalized integral
// of (c*sigma(t)+1)/(2t+1)^2 for x > 0.  Strictly increasing, C^1, range
// (-1, 1).
double eval_sigmoidal(double x);
double sigmoidal_derivative(double x);

// Repeatedly integrated activation, rho_0 = sigma, rho_{i+1} = int_0^x rho_i.
// Supported for s in 1..4.  Positive side uses exact piecewise-polynomial
// tables on unit intervals (valid to x = kSmoothTableMax); negative side
// uses the exact closed forms P(u) + Q(u)*ln(u) with u = 1 - x.
inline constexpr int kMaxSmoothDepth = 4;
inline constexpr double kSmoothTableMax = 4096.0;
double eval_smooth(int s, double x);
double smooth_derivative(int s, double x);

struct SubstitutionResult {
  std::function<double(const std::vector<double>&)> evaluator;
  double delta = 0.0;
  double sup_difference = 0.0;  // measured on the verification grid
  bool converged = false;
};

// Replaces every hidden activation of an all-Euaf network by approximant(delta)
// and halves delta from 1 until the substituted forward pass tracks the
// original within epsilon/2 on a grid over the declared domain.  Fails with
// converged=false once delta underflows 1e-12.
SubstitutionResult substitute_activation(
    const Network& net,
    const std::function<std::function<double(double)>(double)>& approximant,
    double domain_bound, double epsilon, int grid_points = 10000);

struct SigmaApproxResult {
  Network network;         // SigmoidalUaf-activated, width 50, depth 6
  double delta = 0.0;
  double eta0 = 0.0;
  double sup_error = 0.0;  // grid sup of |net(x) - sigma(x)| on [-M, M]
  bool converged = false;
};

// Reproduces the base activation on [-M, M] with a sigmoidal-activated
// network of width 50 and depth 6.  delta and eta0 are chosen by halving
// with grid verification.  Requires M >= 2.
SigmaApproxResult approximate_sigma_by_sigmoidal(double M, double epsilon,
                                                 int grid_points = 10000);

}  // namespace euaf::uaf
