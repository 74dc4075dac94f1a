// Acceptance runner: `acceptance <n>` executes criterion n (1..10) and
// prints one PASS/FAIL line.  Exit code 0 iff the criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "euaf/activation.hpp"
#include "euaf/approx1d.hpp"
#include "euaf/approxnd.hpp"
#include "euaf/autodiff.hpp"
#include "euaf/builtin_targets.hpp"
#include "euaf/classify.hpp"
#include "euaf/gadgets.hpp"
#include "euaf/network.hpp"
#include "euaf/pointfit.hpp"
#include "euaf/uaf_variants.hpp"

using namespace euaf;

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

bool criterion1() {
  const double t0 = now_s();
  Network sq = gadgets::square_net();
  double sup_sq = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = -1.0 + 2.0 * double(i) / 9999.0;
    sup_sq = std::max(sup_sq, std::fabs(eval1(sq, x) - x * x));
  }
  Network pr = gadgets::product_net(1.0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double sup_pr = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng), y = u(rng);
    sup_pr = std::max(sup_pr, std::fabs(eval(pr, std::vector<double>{x, y})[0] - x * y));
  }
  const double dt = now_s() - t0;
  std::printf("  square sup %.3e, product sup %.3e, runtime %.3f s\n", sup_sq, sup_pr, dt);
  return sup_sq <= 1e-12 && sup_pr <= 1e-12 && dt < 1.0;
}

bool criterion2() {
  bool ok = true;
  // half-interval net: width 2, depth 3
  approx1d::Target1D lin;
  lin.evaluator = [](double x) { return x; };
  auto half = approx1d::build_half_approx(lin, 10, 0.6, 50'000'000'000ULL);
  std::printf("  half net: width %zu depth %zu\n", half.network.width(),
              half.network.depth());
  ok = ok && half.network.width() == 2 && half.network.depth() == 3;

  // full-interval net: width 36, depth 5
  approx1d::Target1D zero;
  zero.evaluator = [](double) { return 0.0; };
  auto interval = approx1d::build_interval_approx(zero, 1.0, 8'000'000'000ULL);
  std::printf("  interval net: width %zu depth %zu\n", interval.network.width(),
              interval.network.depth());
  ok = ok && interval.network.width() == 36 && interval.network.depth() == 5;

  // d = 2 assembly: width 360, depth 11, nonzero <= 5437*3*5
  auto kst = approxnd::additive_decomposition(2, {1.0, 1.0}, 0.0, 1.0);
  auto f2 = [](std::span<const double> v) { return v[0] + v[1]; };
  auto [net2, rep2] = approxnd::assemble(0.0, 1.0, kst, 0.25, 1000, f2);
  std::printf("  d=2 assembly: width %zu depth %zu nonzero %zu (<= %d)\n", net2.width(),
              net2.depth(), rep2.nonzero_params, 5437 * 3 * 5);
  ok = ok && net2.width() == 360 && net2.depth() == 11 &&
       rep2.nonzero_params <= std::size_t(5437) * 3 * 5;

  // d = 1 classifier: depth 12, nonzero <= 5509*2*3
  classify::LabeledRegions lr;
  lr.regions = {{{0.0, 0.3}}, {{0.5, 0.8}}};
  lr.labels = {{1, 2}, {-1, 3}};
  lr.box_lo = -0.2;
  lr.box_hi = 1.0;
  auto cls = classify::build_classifier(lr);
  const auto pc = count_params(cls.network);
  std::printf("  classifier: width %zu depth %zu nonzero %zu (<= %d)\n",
              cls.network.width(), cls.network.depth(), pc.nonzero, 5509 * 2 * 3);
  ok = ok && cls.network.depth() == 12 && cls.network.width() == 108 &&
       pc.nonzero <= std::size_t(5509) * 2 * 3;
  return ok;
}

bool criterion3() {
  // The construction's pinned tolerances put the winding search far outside
  // any realistic budget for these targets (the per-candidate hit probability
  // is (2 eps/(16 M))^K with K in the tens to hundreds).  The cases run
  // faithfully and report honestly; see the README's verification notes.
  const std::vector<std::string> names = {"x", "x2", "sin3", "osc1d"};
  bool all_ok = true;
  for (const auto& name : names) {
    for (double eps : {0.3, 0.2}) {
      const double t0 = now_s();
      approx1d::Target1D t;
      t.evaluator = targets::lookup1d(name);
      bool ok = false;
      std::string detail;
      try {
        auto rep = approx1d::build_interval_approx(t, eps, 1'000'000'000ULL);
        ok = rep.grid_sup_error < eps;
        detail = "K=" + std::to_string(rep.K) +
                 " sup=" + std::to_string(rep.grid_sup_error);
      } catch (const construction_error& e) {
        detail = e.what();
      }
      const double dt = now_s() - t0;
      std::printf("  f=%s eps=%.1f: %s (%s, %.1f s)\n", name.c_str(), eps,
                  ok ? "ok" : "FAILED", detail.c_str(), dt);
      all_ok = all_ok && ok && dt < 300.0;
    }
  }
  return all_ok;
}

bool criterion4() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 1 + trial % 3;
    pointfit::FitTargets t;
    for (int k = 0; k < K; ++k) t.values.push_back(u(rng));
    const auto r = pointfit::fit(t, 0.05, 1'000'000'000ULL);
    if (!r.satisfied) {
      std::printf("  trial %d (K=%d) unsatisfied, best %.4f\n", trial, K, r.max_error);
      ok = false;
      continue;
    }
    // independent re-verification
    const auto a = t.frequencies();
    double err = 0.0;
    for (int k = 0; k < K; ++k) err = std::max(err, std::fabs(tri_wave(r.w * a[k]) - t.values[k]));
    if (err != r.max_error || err >= 0.05) {
      std::printf("  trial %d verification mismatch\n", trial);
      ok = false;
    }
  }
  const double cov = pointfit::winding_coverage(2, 10'000'000, 1'000'000.0);
  std::printf("  50 fits done; coverage(K=2, 1e7, 1e6) = %.4f (>= 0.99)\n", cov);
  return ok && cov >= 0.99;
}

bool criterion5() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  auto psi = [](double t) {
    const double inner = eval(ActivationKind::euaf(), t + 1.0);
    return eval(ActivationKind::euaf(), t + 1.0 - inner);
  };
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    double s = 0.0;
    for (int c = 1; c <= 4; ++c) s += psi(x + 0.5 * c);
    worst = std::max(worst, std::fabs(s - 1.0));
  }
  std::printf("  worst |sum - 1| = %.3e\n", worst);
  return worst <= 1e-12;
}

bool criterion6() {
  classify::LabeledRegions lr;
  lr.regions = {{{0.0, 0.3}}, {{0.5, 0.8}}};
  lr.labels = {{1, 2}, {-1, 3}};
  lr.box_lo = -0.2;
  lr.box_hi = 1.0;
  auto rep = classify::build_classifier(lr);
  std::printf("  deviation %.3e on %zu samples; pre-snap slack %.3f\n",
              rep.max_deviation_on_samples, rep.verified_points,
              0.5 - rep.phi1_max_error);
  bool ok = rep.max_deviation_on_samples <= 1e-9 && rep.verified_points >= 2000;

  // plateau robustness: shifting the pre-snap value by less than the slack
  // must leave every region sample's output unchanged
  const double slack = 0.5 - rep.phi1_max_error;
  const double M2 = rep.network.layers[11].w(1, 0);
  for (double bump : {0.9 * slack, -0.9 * slack}) {
    Network pert = rep.network;
    pert.layers[10].bias[0] += bump / M2;
    for (int j = 0; j < 2 && ok; ++j) {
      const auto& iv = lr.regions[j][0];
      for (int i = 0; i < 1000; ++i) {
        const double x = iv[0] + (iv[1] - iv[0]) * double(i) / 999.0;
        if (std::fabs(eval1(pert, x) - eval1(rep.network, x)) > 1e-12) {
          ok = false;
          std::printf("  perturbation moved the output at x=%.4f\n", x);
          break;
        }
      }
    }
  }
  return ok;
}

bool criterion7() {
  bool ok = true;
  const double c = uaf::compute_c();
  const double drift = std::fabs(uaf::compute_c(1 << 19) - c);
  std::printf("  c = %.6f, tail-doubling drift %.2e\n", c, drift);
  ok = ok && c > 2.5 && c < 2.6 && drift < 1e-10;

  double prev = -2.0;
  bool monotone = true, bounded = true;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1e6 + 2e6 * double(i) / 2000.0;
    const double v = uaf::eval_sigmoidal(x);
    monotone = monotone && v > prev;
    bounded = bounded && v > -1.0 && v < 1.0;
    prev = v;
  }
  std::printf("  sigmoidal monotone=%d bounded=%d\n", monotone, bounded);
  ok = ok && monotone && bounded;

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  double worst_fd = 0.0;
  int checked = 0;
  while (checked < 200) {
    const double x = u(rng);
    if (std::fabs(x) < 1e-3 || (x > 0 && std::fabs(x - std::round(x)) < 1e-3)) continue;
    ++checked;
    const double h = 1e-6;
    const double fd = (uaf::eval_sigmoidal(x + h) - uaf::eval_sigmoidal(x - h)) / (2 * h);
    const double dv = uaf::sigmoidal_derivative(x);
    worst_fd = std::max(worst_fd, std::fabs(fd - dv) / std::max(1e-12, std::fabs(dv)));
  }
  std::printf("  derivative FD rel error %.2e\n", worst_fd);
  ok = ok && worst_fd < 1e-6;

  auto res = uaf::approximate_sigma_by_sigmoidal(2.0, 0.1);
  std::printf("  sigma reproduction: converged=%d sup=%.4f width=%zu depth=%zu\n",
              res.converged, res.sup_error, res.network.width(), res.network.depth());
  ok = ok && res.converged && res.sup_error < 0.1 && res.network.width() == 50 &&
       res.network.depth() == 6;
  return ok;
}

bool criterion8() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> uw(-1.0, 1.0);
  const double h = 1e-6;
  double worst = 0.0;
  int nets_checked = 0;
  while (nets_checked < 100) {
    Network net;
    net.input_dim = 1;
    const int depth = 1 + int(rng() % 3);
    std::size_t prevdim = 1;
    for (int li = 0; li <= depth; ++li) {
      const std::size_t out = li == depth ? 1 : 2 + rng() % 5;
      AffineLayer L(out, prevdim);
      for (auto& v : L.weights) v = uw(rng);
      for (auto& v : L.bias) v = uw(rng);
      net.layers.push_back(std::move(L));
      if (li < depth) net.hidden_activations.emplace_back(out, ActivationKind::euaf());
      prevdim = out;
    }
    double x = uw(rng);
    bool near = true;
    for (int guard = 0; guard < 100 && near; ++guard) {
      x = uw(rng);
      near = false;
      const auto tape = autodiff::forward(net, std::vector<double>{x});
      for (std::size_t li = 0; li + 1 < net.layers.size() && !near; ++li)
        for (double v : tape.pre[li])
          if (v >= -1e-3 && std::fabs(v - std::round(v)) < 1e-3) near = true;
    }
    if (near) continue;
    ++nets_checked;
    const auto g = autodiff::grad(net, std::vector<double>{x}, 1.0);
    auto theta = autodiff::get_params(net);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      auto tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      Network plus = net, minus = net;
      autodiff::set_params(plus, tp);
      autodiff::set_params(minus, tm);
      const double fd = (eval1(plus, x) - eval1(minus, x)) / (2.0 * h);
      const double scale = std::max({1.0, std::fabs(fd), std::fabs(g[k])});
      worst = std::max(worst, std::fabs(fd - g[k]) / scale);
    }
  }
  std::printf("  worst relative gradient error over 100 nets: %.2e\n", worst);
  return worst < 1e-4;
}

bool criterion9() {
  const auto target = targets::lookup("sin8").fn;
  autodiff::TrainConfig cfg;
  cfg.steps = 2000;
  cfg.batch = 128;
  cfg.lr0 = 0.02;
  cfg.decay = 0.9;
  cfg.decay_period = 780;
  cfg.seed = 42;
  cfg.n_train = 20000;
  cfg.trace_every = 500;
  bool ok = true;
  for (const auto act : {ActivationKind::euaf(), ActivationKind::relu()}) {
    auto r = autodiff::train_toy(target, 1, 40, 2, act, cfg);
    const double ratio = r.final_train_mse / r.initial_train_mse;
    std::printf("  %s: %.5f -> %.5f (ratio %.3f)\n", to_string(act).c_str(),
                r.initial_train_mse, r.final_train_mse, ratio);
    ok = ok && !r.diverged && ratio <= 0.5;
  }
  return ok;
}

bool criterion10() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const std::vector<ActivationKind> kinds = {
      ActivationKind::euaf(), ActivationKind::relu(), ActivationKind::identity(),
      ActivationKind::snap(), ActivationKind::smooth(2)};
  for (int trial = 0; trial < 100; ++trial) {
    Network net;
    net.input_dim = 1 + rng() % 3;
    const int depth = 1 + int(rng() % 4);
    std::size_t prevdim = net.input_dim;
    for (int li = 0; li <= depth; ++li) {
      const std::size_t out = li == depth ? 1 : 1 + rng() % 6;
      AffineLayer L(out, prevdim);
      for (auto& v : L.weights) v = u(rng);
      for (auto& v : L.bias) v = u(rng);
      net.layers.push_back(std::move(L));
      if (li < depth) {
        std::vector<ActivationKind> tags;
        for (std::size_t r = 0; r < out; ++r) tags.push_back(kinds[rng() % kinds.size()]);
        net.hidden_activations.push_back(std::move(tags));
      }
      prevdim = out;
    }
    Network back = deserialize(serialize(net));
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
      for (std::size_t k = 0; k < net.layers[li].weights.size(); ++k)
        if (net.layers[li].weights[k] != back.layers[li].weights[k]) return false;
      for (std::size_t k = 0; k < net.layers[li].bias.size(); ++k)
        if (net.layers[li].bias[k] != back.layers[li].bias[k]) return false;
    }
    if (net.hidden_activations != back.hidden_activations) return false;
  }
  std::printf("  100 random networks round-tripped bitwise\n");
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
    return 2;
  }
  const int n = std::atoi(argv[1]);
  bool ok = false;
  switch (n) {
    case 1: ok = criterion1(); break;
    case 2: ok = criterion2(); break;
    case 3: ok = criterion3(); break;
    case 4: ok = criterion4(); break;
    case 5: ok = criterion5(); break;
    case 6: ok = criterion6(); break;
    case 7: ok = criterion7(); break;
    case 8: ok = criterion8(); break;
    case 9: ok = criterion9(); break;
    case 10: ok = criterion10(); break;
    default:
      std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
      return 2;
  }
  std::printf("criterion %d: %s\n", n, ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
