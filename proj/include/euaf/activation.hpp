#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace euaf {

// Activation tags understood by every evaluation path in the library.
//
// Euaf is the piecewise glue of a period-2 triangular wave (x >= 0) and
// softsign (x < 0).  Step is x - Euaf(x), Snap is x + 1/2 - Euaf(x + 3/2).
// Ramp carries its transition length eta0, SmoothUaf its integration depth s.
enum class Act : std::uint8_t {
  Euaf,
  TriWave,
  Softsign,
  Step,
  Snap,
  Ramp,
  ReLU,
  Identity,
  SigmoidalUaf,
  SmoothUaf,
};

struct ActivationKind {
  Act tag = Act::Euaf;
  double eta0 = 0.0;  // Ramp only, must lie in (0,1)
  int s = 0;          // SmoothUaf only, 1..4

  static ActivationKind euaf() { return {Act::Euaf, 0.0, 0}; }
  static ActivationKind tri_wave() { return {Act::TriWave, 0.0, 0}; }
  static ActivationKind softsign() { return {Act::Softsign, 0.0, 0}; }
  static ActivationKind step() { return {Act::Step, 0.0, 0}; }
  static ActivationKind snap() { return {Act::Snap, 0.0, 0}; }
  static ActivationKind ramp(double eta0);
  static ActivationKind relu() { return {Act::ReLU, 0.0, 0}; }
  static ActivationKind identity() { return {Act::Identity, 0.0, 0}; }
  static ActivationKind sigmoidal() { return {Act::SigmoidalUaf, 0.0, 0}; }
  static ActivationKind smooth(int s);

  bool operator==(const ActivationKind& o) const {
    return tag == o.tag && eta0 == o.eta0 && s == o.s;
  }
};

// Period-2 triangular wave |x - 2*floor((x+1)/2)|, evaluated by the closed
// form so large arguments stay exact up to one rounding of the product.
double tri_wave(double x);

// x / (|x|+1)
double softsign(double x);

// Scalar evaluation.  Throws std::domain_error on non-finite input.
double eval(const ActivationKind& kind, double x);

// One-sided derivative selection: at kink points the right-hand derivative
// is returned.  Same domain checks as eval().
double subgradient(const ActivationKind& kind, double x);

// All non-smooth points of the activation inside [lo, hi], sorted and
// deduplicated.  Points where only higher derivatives jump are included.
std::vector<double> breakpoints(const ActivationKind& kind, double lo, double hi);

// Canonical names used by the JSON network format: "euaf", "identity",
// "relu", "step", "snap", "triwave", "softsign", "sigmoidal",
// "ramp(<eta0>)", "smooth(<s>)".
std::string to_string(const ActivationKind& kind);
ActivationKind activation_from_string(const std::string& name);

}  // namespace euaf
