#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "euaf/network.hpp"

namespace euaf::autodiff {

// Reverse-mode record of one forward pass: pre-activation values per layer
// in topological order, plus the flattened parameter index map (layer-major,
// weights row-major, then bias).
struct Tape {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;   // pre-activation per layer
  std::vector<std::vector<double>> post;  // post-activation per layer
};

Tape forward(const Network& net, std::span<const double> x);

std::size_t param_count(const Network& net);
std::vector<double> get_params(const Network& net);
void set_params(Network& net, std::span<const double> theta);

// d(out)/d(theta) scaled by `upstream`, via the right-derivative convention
// at kinks.  Scalar-output networks only.
std::vector<double> grad(const Network& net, std::span<const double> x, double upstream);

// d(out)/d(x_i) by the same backward pass.
std::vector<double> input_grad(const Network& net, std::span<const double> x,
                               double upstream);

enum class Loss { MSE, MAE, MAX };

struct TrainConfig {
  int steps = 2000;
  int batch = 128;
  double lr0 = 0.02;
  double decay = 0.9;
  int decay_period = 780;  // steps between staircase drops
  std::uint64_t seed = 1;
  Loss loss = Loss::MSE;
  int n_train = 20000;
  int n_test = 2000;
  int trace_every = 100;
};

struct TraceRow {
  int step = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double test_mae = 0.0;
  double test_max = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  double initial_train_mse = 0.0;
  double final_train_mse = 0.0;
  bool diverged = false;
  Network network;
};

// Mini-batch SGD on a freshly initialized dense net (input_dim -> width x
// depth -> 1, all hidden neurons tagged `act`) against the target on
// [0,1]^input_dim.  Deterministic for a fixed seed.
TrainResult train_toy(const std::function<double(std::span<const double>)>& target,
                      int input_dim, int width, int depth, const ActivationKind& act,
                      const TrainConfig& config);

}  // namespace euaf::autodiff
