#include <cmath>
#include <random>

#include "doctest.h"
#include "euaf/classify.hpp"
#include "euaf/network.hpp"

using namespace euaf;
using classify::LabeledRegions;
using classify::Rational;

namespace {

LabeledRegions two_interval_case() {
  LabeledRegions lr;
  lr.regions = {{{0.0, 0.3}}, {{0.5, 0.8}}};
  lr.labels = {{1, 2}, {-1, 3}};  // 1/2 and -1/3
  lr.box_lo = -0.2;
  lr.box_hi = 1.0;
  return lr;
}

}  // namespace

TEST_CASE("continuous extension interpolates between regions") {
  LabeledRegions lr;
  lr.regions = {{{0.0, 0.3}}, {{0.5, 0.8}}};
  lr.labels = {{1, 1}, {0, 1}};
  lr.box_lo = 0.0;
  lr.box_hi = 1.0;
  auto g = classify::continuous_extension(lr);
  CHECK(g(0.4) == doctest::Approx(0.5));  // equidistant between the regions
  std::mt19937_64 rng(71);
  for (int j = 0; j < 2; ++j) {
    const double lo = lr.regions[j][0][0], hi = lr.regions[j][0][1];
    std::uniform_real_distribution<double> u(lo, hi);
    const double want = lr.labels[j].value();
    for (int i = 0; i < 1000; ++i) CHECK(g(u(rng)) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("single region extension is constant on the region") {
  LabeledRegions lr;
  lr.regions = {{{0.2, 0.6}}};
  lr.labels = {{1, 1}};
  auto g = classify::continuous_extension(lr);
  for (int i = 0; i < 100; ++i) CHECK(g(0.2 + 0.4 * i / 99.0) == doctest::Approx(1.0));
}

TEST_CASE("point cloud extension matches labels on members") {
  classify::LabeledPointClouds pc;
  pc.clouds = {{{0.0, 0.0}, {0.1, 0.0}}, {{1.0, 1.0}}};
  pc.labels = {{2, 1}, {5, 1}};
  auto g = classify::continuous_extension_nd(pc);
  CHECK(g({0.0, 0.0}) == doctest::Approx(2.0));
  CHECK(g({0.1, 0.0}) == doctest::Approx(2.0));
  CHECK(g({1.0, 1.0}) == doctest::Approx(5.0));
  classify::LabeledPointClouds clash;
  clash.clouds = {{{0.0, 0.0}}, {{0.0, 0.0}}};
  clash.labels = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(classify::continuous_extension_nd(clash), validation_error);
}

TEST_CASE("integer selection") {
  {
    const auto [n1, n2] = classify::choose_integers({{1, 1}, {0, 1}}, 0.0, 1.0);
    CHECK(n1 == 1);
    CHECK(n2 == 1);
  }
  {
    const auto [n1, n2] =
        classify::choose_integers({{1, 2}, {-1, 3}}, -1.0 / 3.0, 0.5);
    CHECK(n1 == 6);
    CHECK(n2 >= 3);
    CHECK(n1 / 2 + n2 >= 1);       // n1 * 1/2 + n2
    CHECK(-n1 / 3 + n2 >= 1);      // n1 * (-1/3) + n2
    CHECK(double(n1) * (-1.0 / 3.0) + double(n2) >= 0.0);
  }
  {
    const auto [n1, n2] = classify::choose_integers({{0, 1}}, 0.0, 0.0);
    CHECK(n1 == 1);
    CHECK(n2 == 1);
  }
}

TEST_CASE("two-interval rational classifier is exact") {
  auto rep = classify::build_classifier(two_interval_case());
  CHECK(rep.network.depth() == 12);
  CHECK(rep.network.width() == 108);
  CHECK(count_params(rep.network).nonzero <= 5509u * 2u * 3u);
  CHECK(rep.verified_points >= 2000);
  CHECK(rep.max_deviation_on_samples <= 1e-9);
  // rational recovery: (value * 2 n1 + 2 n2 + 1) is an odd integer
  for (double x : {0.0, 0.12, 0.3, 0.5, 0.66, 0.8}) {
    const double v = eval1(rep.network, x);
    const double odd = v * 2.0 * double(rep.n1) + 2.0 * double(rep.n2) + 1.0;
    CHECK(std::fabs(odd - 2.0 * std::round((odd - 1.0) / 2.0) - 1.0) <= 1e-9);
  }
}

TEST_CASE("members of one region map to one snapped value") {
  // the snap plateau is exact in real arithmetic; in binary64 the
  // M*sigma(y/M) realization leaves rounding noise below 1e-12
  auto rep = classify::build_classifier(two_interval_case());
  const double v0 = eval1(rep.network, 0.05);
  for (int i = 0; i < 200; ++i)
    CHECK(std::fabs(eval1(rep.network, 0.3 * i / 199.0) - v0) <= 1e-12);
  const double v1 = eval1(rep.network, 0.65);
  for (int i = 0; i < 200; ++i)
    CHECK(std::fabs(eval1(rep.network, 0.5 + 0.3 * i / 199.0) - v1) <= 1e-12);
}

TEST_CASE("plateau robustness against pre-snap perturbations") {
  auto rep = classify::build_classifier(two_interval_case());
  const double slack = 0.5 - rep.phi1_max_error;
  REQUIRE(slack > 0.4);  // the pre-snap stage is piecewise linear and exact
  // The chain carries phi1/M2 into the snap layer, whose second row reads it
  // with weight exactly M2.  Adding bump/M2 to the last chain bias therefore
  // shifts phi1 by `bump`; anything smaller than the plateau slack must not
  // move the output on region members.
  const double M2 = rep.network.layers[11].w(1, 0);
  REQUIRE(M2 > 0.0);
  for (double bump : {0.9 * slack, -0.9 * slack, 0.25, -0.25}) {
    Network pert = rep.network;
    pert.layers[10].bias[0] += bump / M2;
    for (double x : {0.1, 0.2, 0.29, 0.51, 0.7, 0.79}) {
      CHECK(eval1(pert, x) == doctest::Approx(eval1(rep.network, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("single rational label") {
  LabeledRegions lr;
  lr.regions = {{{0.1, 0.4}}};
  lr.labels = {{7, 1}};
  lr.box_lo = 0.0;
  lr.box_hi = 1.0;
  auto rep = classify::build_classifier(lr);
  for (int i = 0; i < 500; ++i)
    CHECK(eval1(rep.network, 0.1 + 0.3 * i / 499.0) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("validation rejects touching regions") {
  LabeledRegions lr;
  lr.regions = {{{0.0, 0.5}}, {{0.5, 0.8}}};
  lr.labels = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(lr.validate(), validation_error);
  lr.regions = {{{0.0, 0.5}}, {{0.7, 0.8}}};
  lr.labels[0].den = 0;
  CHECK_THROWS_AS(lr.validate(), validation_error);
}
