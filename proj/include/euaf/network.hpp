#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "euaf/activation.hpp"

namespace euaf {

// Raised when an input document or argument violates a structural contract.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a construction cannot reach its target (search budget or
// delta exhaustion).  best_effort carries whatever quality was reached.
class construction_error : public std::runtime_error {
 public:
  construction_error(const std::string& what, double best_effort)
      : std::runtime_error(what), best_effort_error(best_effort) {}
  double best_effort_error = 0.0;
};

struct AffineLayer {
  std::size_t out_dim = 0;
  std::size_t in_dim = 0;
  std::vector<double> weights;  // row-major, out_dim x in_dim
  std::vector<double> bias;     // out_dim

  AffineLayer() = default;
  AffineLayer(std::size_t out, std::size_t in)
      : out_dim(out), in_dim(in), weights(out * in, 0.0), bias(out, 0.0) {}

  double& w(std::size_t row, std::size_t col) { return weights[row * in_dim + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * in_dim + col]; }
};

struct Hypercube {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct ParamCount {
  std::size_t total = 0;
  std::size_t nonzero = 0;
};

// Layered affine+activation model.  layers.back() is the output affine map
// and carries no activations; hidden_activations[i] tags layer i's neurons.
struct Network {
  std::size_t input_dim = 0;
  std::vector<AffineLayer> layers;
  std::vector<std::vector<ActivationKind>> hidden_activations;
  std::optional<Hypercube> domain;

  std::size_t depth() const {  // number of hidden layers
    return layers.empty() ? 0 : layers.size() - 1;
  }
  std::size_t width() const {  // max hidden dimension
    std::size_t w = 0;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
      w = std::max(w, layers[i].out_dim);
    return w;
  }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }

  void validate() const;  // dimension chaining, tag list shapes
};

std::vector<double> eval(const Network& net, std::span<const double> x);
double eval1(const Network& net, double x);  // scalar-in / scalar-out helper

// Exact function composition: result(x) = outer(inner(x)).
// With no junction tags the two affine maps at the seam are fused
// (depth = d_in + d_out); otherwise a hidden junction layer carrying
// `junction` is inserted (depth = d_in + d_out + 1).
Network compose(const Network& outer, const Network& inner,
                const std::optional<std::vector<ActivationKind>>& junction = std::nullopt);

// Block-diagonal stacking of same-input networks.  When equalize_depth is
// set, shallower branches are extended with identity-on-[-M,M] layers
// (2M*sigma((t+M)/2M) - M per channel); range_bounds[i] must then supply a
// bound on branch i's output magnitude.
Network parallel(const std::vector<Network>& nets, bool equalize_depth = false,
                 const std::vector<double>& range_bounds = {});

// parallel() followed by a fused 1 x n combining row.
Network sum(const std::vector<Network>& nets, const std::vector<double>& coefficients,
            const std::vector<double>& range_bounds = {});

ParamCount count_params(const Network& net);

// JSON round trip.  Serialized weights are binary64 rendered with
// shortest-round-trip decimals, so deserialize(serialize(n)) is bit-exact.
std::string serialize(const Network& net);
Network deserialize(const std::string& text);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace euaf
