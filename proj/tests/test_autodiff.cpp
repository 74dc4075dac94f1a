#include <cmath>
#include <random>

#include "doctest.h"
#include "euaf/autodiff.hpp"
#include "euaf/builtin_targets.hpp"
#include "euaf/gadgets.hpp"
#include "euaf/network.hpp"

using namespace euaf;

namespace {

Network random_euaf_net(std::mt19937_64& rng, int width, int depth) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Network net;
  net.input_dim = 1;
  std::size_t prev = 1;
  for (int li = 0; li <= depth; ++li) {
    const std::size_t out = li == depth ? 1 : std::size_t(width);
    AffineLayer L(out, prev);
    for (auto& v : L.weights) v = u(rng);
    for (auto& v : L.bias) v = u(rng);
    net.layers.push_back(std::move(L));
    if (li < depth) net.hidden_activations.emplace_back(out, ActivationKind::euaf());
    prev = out;
  }
  return net;
}

// true when any hidden pre-activation sits within `margin` of a kink
bool near_kink(const Network& net, double x, double margin) {
  const auto tape = autodiff::forward(net, std::vector<double>{x});
  for (std::size_t li = 0; li + 1 < net.layers.size(); ++li)
    for (double v : tape.pre[li]) {
      if (v >= -margin) {
        const double frac = v - std::round(v);
        if (std::fabs(frac) < margin) return true;
      }
    }
  return false;
}

}  // namespace

TEST_CASE("gradient of a linear net w.r.t. its weight is the input") {
  Network net;
  net.input_dim = 1;
  AffineLayer L(1, 1);
  L.w(0, 0) = 2.0;
  L.bias[0] = 0.5;
  net.layers.push_back(L);
  const auto g = autodiff::grad(net, std::vector<double>{3.0}, 1.0);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == 3.0);  // d(out)/dw = x
  CHECK(g[1] == 1.0);  // d(out)/db = 1
}

TEST_CASE("input gradient of the square block is 2x") {
  Network sq = gadgets::square_net();
  const auto g = autodiff::input_grad(sq, std::vector<double>{0.5}, 1.0);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-6));  // d(x^2)/dx at 0.5
}

TEST_CASE("reverse mode matches central differences over random nets") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  const double h = 1e-6;
  int nets_checked = 0;
  while (nets_checked < 100) {
    Network net = random_euaf_net(rng, 4, 3);
    double x = ux(rng);
    int guard = 0;
    while (near_kink(net, x, 1e-3) && guard++ < 50) x = ux(rng);
    if (guard >= 50) continue;
    ++nets_checked;
    const auto g = autodiff::grad(net, std::vector<double>{x}, 1.0);
    auto theta = autodiff::get_params(net);
    double worst_rel = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      Network plus = net, minus = net;
      auto tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      autodiff::set_params(plus, tp);
      autodiff::set_params(minus, tm);
      const double fd = (eval1(plus, x) - eval1(minus, x)) / (2.0 * h);
      const double scale = std::max({1.0, std::fabs(fd), std::fabs(g[k])});
      worst_rel = std::max(worst_rel, std::fabs(fd - g[k]) / scale);
    }
    CHECK(worst_rel < 1e-4);
  }
}

TEST_CASE("constant target trains to zero quickly") {
  autodiff::TrainConfig cfg;
  cfg.steps = 200;
  cfg.batch = 32;
  cfg.lr0 = 0.1;
  cfg.decay = 1.0;
  cfg.decay_period = 1000;
  cfg.seed = 5;
  cfg.n_train = 1000;
  cfg.n_test = 200;
  cfg.trace_every = 50;
  auto r = autodiff::train_toy([](std::span<const double>) { return 0.7; }, 1, 4, 1,
                               ActivationKind::identity(), cfg);
  CHECK_FALSE(r.diverged);
  CHECK(r.final_train_mse < 1e-3);
}

TEST_CASE("oscillatory slice trains under both activations with a fixed seed") {
  const auto target = targets::lookup("sin8").fn;
  autodiff::TrainConfig cfg;
  cfg.steps = 2000;
  cfg.batch = 128;
  cfg.lr0 = 0.02;
  cfg.decay = 0.9;
  cfg.decay_period = 780;
  cfg.seed = 42;
  cfg.n_train = 20000;
  cfg.trace_every = 200;
  double finals[2] = {0.0, 0.0};
  int idx = 0;
  for (const auto act : {ActivationKind::euaf(), ActivationKind::relu()}) {
    auto r = autodiff::train_toy(target, 1, 40, 2, act, cfg);
    CHECK_FALSE(r.diverged);
    CHECK(r.final_train_mse <= 0.5 * r.initial_train_mse);
    finals[idx++] = r.final_train_mse;
    // deterministic re-run
    auto r2 = autodiff::train_toy(target, 1, 40, 2, act, cfg);
    REQUIRE(r2.trace.size() == r.trace.size());
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      CHECK(r.trace[i].train_mse == r2.trace[i].train_mse);
      CHECK(r.trace[i].test_max == r2.trace[i].test_max);
    }
  }
  CHECK(finals[0] > 0.0);
  CHECK(finals[1] > 0.0);
}

TEST_CASE("loss definitions on a hand-checked three-sample batch") {
  // phi(x) = x on three samples against targets {0, 1, 3}
  Network net;
  net.input_dim = 1;
  AffineLayer L(1, 1);
  L.w(0, 0) = 1.0;
  net.layers.push_back(L);
  const std::vector<double> xs = {1.0, 2.0, 0.0};
  const std::vector<double> ys = {0.0, 1.0, 3.0};
  double mse = 0.0, mae = 0.0, mx = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e = eval1(net, xs[i]) - ys[i];
    mse += e * e / 3.0;
    mae += std::fabs(e) / 3.0;
    mx = std::max(mx, std::fabs(e));
  }
  CHECK(mse == doctest::Approx((1.0 + 1.0 + 9.0) / 3.0));
  CHECK(mae == doctest::Approx((1.0 + 1.0 + 3.0) / 3.0));
  CHECK(mx == 3.0);
}

TEST_CASE("desk-scale limits are enforced") {
  autodiff::TrainConfig cfg;
  CHECK_THROWS_AS(autodiff::train_toy([](std::span<const double>) { return 0.0; }, 1, 200,
                                      2, ActivationKind::euaf(), cfg),
                  validation_error);
}
