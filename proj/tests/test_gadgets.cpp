#include <cmath>
#include <random>

#include "doctest.h"
#include "euaf/gadgets.hpp"
#include "euaf/network.hpp"

using namespace euaf;

TEST_CASE("square block is exact on [-1,1]") {
  Network sq = gadgets::square_net();
  CHECK(sq.width() == 3);
  CHECK(sq.depth() == 2);
  CHECK(eval1(sq, 0.0) == 0.0);
  CHECK(eval1(sq, -1.0) == doctest::Approx(1.0).epsilon(1e-14));
  double sup = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = -1.0 + 2.0 * double(i) / 9999.0;
    sup = std::max(sup, std::fabs(eval1(sq, x) - x * x));
  }
  CHECK(sup <= 1e-12);
}

TEST_CASE("product block is exact at scale") {
  std::mt19937_64 rng(29);
  for (double M : {1.0, 10.0, 100.0}) {
    Network pr = gadgets::product_net(M);
    CHECK(pr.width() == 9);
    CHECK(pr.depth() == 2);
    std::uniform_real_distribution<double> u(-M, M);
    double sup = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double x = u(rng), y = u(rng);
      sup = std::max(sup, std::fabs(eval(pr, std::vector<double>{x, y})[0] - x * y));
    }
    CHECK(sup <= 1e-10 * M * M);
    // zero factor annihilates up to the M^2-scaled cancellation noise
    CHECK(std::fabs(eval(pr, std::vector<double>{0.0, u(rng)})[0]) <= 1e-10 * M * M);
  }
  Network pr3 = gadgets::product_net(3.0);
  CHECK(eval(pr3, std::vector<double>{2.0, 3.0})[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("step encoder maps whole intervals to their index") {
  std::mt19937_64 rng(31);
  CHECK(eval1(gadgets::step_encode_net(5), 0.05) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eval1(gadgets::step_encode_net(5), 0.25) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(eval1(gadgets::step_encode_net(1), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  for (int K : {1, 5, 50}) {
    Network net = gadgets::step_encode_net(K);
    // one wave neuron plus an identity pass-through, one hidden layer
    CHECK(net.depth() == 1);
    int wave_neurons = 0;
    for (const auto& t : net.hidden_activations[0])
      if (t.tag == Act::Euaf) ++wave_neurons;
    CHECK(wave_neurons == 1);
    for (int k = 1; k <= K; ++k) {
      std::uniform_real_distribution<double> u(double(2 * k - 2) / (2 * K),
                                               double(2 * k - 1) / (2 * K));
      for (int i = 0; i < 100; ++i) {
        const double out = eval1(net, u(rng));
        CHECK(std::lround(out) == k);
        CHECK(std::fabs(out - double(k)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("bump components form a partition of unity") {
  const int K = 10;
  std::vector<Network> comps;
  for (int i = 1; i <= 4; ++i) comps.push_back(gadgets::partition_component_net(K, i));
  for (const auto& c : comps) {
    CHECK(c.width() == 2);
    CHECK(c.depth() == 2);
  }
  double s = 0.0;
  for (const auto& c : comps) s += eval1(c, 0.37);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  // each component stays inside [0,1] and vanishes on its dead half
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 0.9);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    double total = 0.0;
    for (int c = 0; c < 4; ++c) {
      const double v = eval1(comps[c], x);
      CHECK(v >= -1e-15);
      CHECK(v <= 1.0 + 1e-15);
      total += v;
      const double y = 2.0 * K * x + 0.5 * (c + 1);
      const double frac = y - 2.0 * std::floor(y / 2.0);
      if (frac >= 1.0) CHECK(std::fabs(v) <= 1e-13);  // odd half: component is zero
    }
    CHECK(std::fabs(total - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(gadgets::partition_component_net(9, 1), validation_error);
  CHECK_THROWS_AS(gadgets::partition_component_net(10, 5), validation_error);
}

TEST_CASE("raw bump sums to one on [0, 100]") {
  // psi(x + i/2) summed over i = 1..4, with psi(t) = sigma(t+1-sigma(t+1))
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  auto psi = [](double t) {
    const double inner = eval(ActivationKind::euaf(), t + 1.0);
    return eval(ActivationKind::euaf(), t + 1.0 - inner);
  };
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    double s = 0.0;
    for (int c = 1; c <= 4; ++c) s += psi(x + 0.5 * c);
    CHECK(std::fabs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("snapping block hits the odd plateaus") {
  Network snap = gadgets::snap_net(10.0);
  CHECK(snap.width() == 2);
  CHECK(snap.depth() == 1);
  CHECK(eval1(snap, 3.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eval1(snap, 3.5) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eval1(snap, 4.6) == doctest::Approx(5.0).epsilon(1e-14));
  // idempotent on plateau values
  for (double y : {2.7, 3.2, 5.4, 7.0, 8.6}) {
    const double once = eval1(snap, y);
    CHECK(eval1(snap, once) == doctest::Approx(once).epsilon(1e-14));
  }
}

TEST_CASE("magnitude-reduced affine block") {
  auto small = gadgets::magnitude_reduced_affine(1.0, 1.0, 1.0);
  CHECK(small.max_parameter <= small.c0 + 1e-12);
  auto big = gadgets::magnitude_reduced_affine(1e4, 1.0, 1.0);
  CHECK(eval1(big.network, 0.5) == doctest::Approx(5001.0).epsilon(1e-9));
  CHECK(big.max_parameter <= 100.0 * big.c0 + 1e-9);
  CHECK(big.network.depth() == 2);
  // exactness across the declared range
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = 1e4, b = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(std::fabs(eval1(big.network, x) - (a * x + b)) <= 1e-9 * (a * 1.0 + b));
  }
  CHECK_THROWS_AS(gadgets::magnitude_reduced_affine(0.5, 1.0, 1.0), validation_error);
}

TEST_CASE("gadget spec dispatch") {
  gadgets::GadgetSpec spec;
  spec.kind = gadgets::GadgetSpec::Kind::Product;
  spec.M = 2.0;
  Network net = gadgets::build(spec);
  CHECK(net.width() == 9);
}
