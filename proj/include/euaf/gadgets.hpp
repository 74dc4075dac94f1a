#pragma once

#include "euaf/network.hpp"

namespace euaf::gadgets {

// Width 3, depth 2; equals x^2 on [-1, 1] up to float rounding.
Network square_net();

// Width 9, depth 2; equals x*y for x, y in [-M, M].  The polarization
// identity subtracts terms of size ~M^2, so accuracy scales with M^2.
Network product_net(double M);

// Maps the whole interval [(2k-2)/2K, (2k-1)/2K] to exactly k.  One
// triangular-wave neuron plus one pass-through channel, depth 1.
Network step_encode_net(int K);

// psi(2Kx + i/2) with psi(t) = sigma(t + 1 - sigma(t + 1)), valid on
// x in [0, 9/10].  Width 2, depth 2.  Requires K >= 10, i in 1..4.
Network partition_component_net(int K, int i);

// y -> y + 1/2 - sigma(y + 3/2) for y in [0, M]; constant 2k+1 on the
// plateaus |y - (2k+1)| <= 1/2.  Width 2, depth 1.
Network snap_net(double M);

// Exact identity on [-M, M] built from `depth` width-1 hidden layers.
Network identity_widen_net(double M, int depth);

struct MagnitudeReducedAffine {
  Network network;
  double c0 = 0.0;         // range-dependent constant in the magnitude bound
  double max_parameter = 0.0;
};

// Realizes x -> a*x + b on [-range_bound, range_bound] with every parameter
// bounded by max(sqrt(a), sqrt(b)) * c0.  Requires a, b >= 1.
MagnitudeReducedAffine magnitude_reduced_affine(double a, double b, double range_bound);

struct GadgetSpec {
  enum class Kind {
    Square,
    Product,
    StepNet,
    PartitionComponent,
    IdentityWiden,
    SnapNet,
    MagnitudeReduced,
  };
  Kind kind = Kind::Square;
  double M = 1.0;
  int K = 10;
  int component = 1;
  int depth = 1;
  double a = 1.0;
  double b = 1.0;
  double range_bound = 1.0;
};

Network build(const GadgetSpec& spec);

}  // namespace euaf::gadgets
