#include "euaf/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace euaf::autodiff {

Tape forward(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim) throw validation_error("forward: input dim mismatch");
  Tape tape;
  tape.input.assign(x.begin(), x.end());
  const std::vector<double>* h = &tape.input;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const AffineLayer& L = net.layers[li];
    std::vector<double> pre(L.out_dim);
    for (std::size_t r = 0; r < L.out_dim; ++r) {
      double v = L.bias[r];
      const double* wrow = &L.weights[r * L.in_dim];
      for (std::size_t c = 0; c < L.in_dim; ++c) v += wrow[c] * (*h)[c];
      pre[r] = v;
    }
    std::vector<double> post = pre;
    if (li + 1 < net.layers.size()) {
      const auto& tags = net.hidden_activations[li];
      for (std::size_t r = 0; r < L.out_dim; ++r) post[r] = eval(tags[r], post[r]);
    }
    tape.pre.push_back(std::move(pre));
    tape.post.push_back(std::move(post));
    h = &tape.post.back();
  }
  return tape;
}

std::size_t param_count(const Network& net) {
  std::size_t n = 0;
  for (const auto& L : net.layers) n += L.out_dim * L.in_dim + L.out_dim;
  return n;
}

std::vector<double> get_params(const Network& net) {
  std::vector<double> theta;
  theta.reserve(param_count(net));
  for (const auto& L : net.layers) {
    theta.insert(theta.end(), L.weights.begin(), L.weights.end());
    theta.insert(theta.end(), L.bias.begin(), L.bias.end());
  }
  return theta;
}

void set_params(Network& net, std::span<const double> theta) {
  if (theta.size() != param_count(net)) throw validation_error("set_params: size mismatch");
  std::size_t k = 0;
  for (auto& L : net.layers) {
    for (auto& v : L.weights) v = theta[k++];
    for (auto& v : L.bias) v = theta[k++];
  }
}

namespace {

// Backward pass shared by grad() and input_grad(); fills dtheta when
// non-null and returns dL/dinput.
std::vector<double> backward(const Network& net, const Tape& tape, double upstream,
                             std::vector<double>* dtheta) {
  const std::size_t n_layers = net.layers.size();
  std::vector<double> delta = {upstream};  // dL/d(pre) of the current layer
  if (net.layers.back().out_dim != 1)
    throw validation_error("backward: scalar output expected");

  if (dtheta) dtheta->assign(param_count(net), 0.0);
  // offsets of each layer's parameter slice
  std::vector<std::size_t> offset(n_layers);
  std::size_t acc = 0;
  for (std::size_t li = 0; li < n_layers; ++li) {
    offset[li] = acc;
    acc += net.layers[li].out_dim * net.layers[li].in_dim + net.layers[li].out_dim;
  }

  for (std::size_t li = n_layers; li-- > 0;) {
    const AffineLayer& L = net.layers[li];
    const std::vector<double>& in =
        li == 0 ? tape.input : tape.post[li - 1];
    if (dtheta) {
      double* slice = dtheta->data() + offset[li];
      for (std::size_t r = 0; r < L.out_dim; ++r) {
        for (std::size_t c = 0; c < L.in_dim; ++c) slice[r * L.in_dim + c] += delta[r] * in[c];
        slice[L.out_dim * L.in_dim + r] += delta[r];
      }
    }
    std::vector<double> prev(L.in_dim, 0.0);
    for (std::size_t r = 0; r < L.out_dim; ++r) {
      const double* wrow = &L.weights[r * L.in_dim];
      for (std::size_t c = 0; c < L.in_dim; ++c) prev[c] += wrow[c] * delta[r];
    }
    if (li > 0) {
      const auto& tags = net.hidden_activations[li - 1];
      for (std::size_t c = 0; c < L.in_dim; ++c)
        prev[c] *= subgradient(tags[c], tape.pre[li - 1][c]);
    }
    delta.swap(prev);
  }
  return delta;  // gradient w.r.t. the input
}

}  // namespace

std::vector<double> grad(const Network& net, std::span<const double> x, double upstream) {
  const Tape tape = forward(net, x);
  std::vector<double> dtheta;
  backward(net, tape, upstream, &dtheta);
  return dtheta;
}

std::vector<double> input_grad(const Network& net, std::span<const double> x,
                               double upstream) {
  const Tape tape = forward(net, x);
  return backward(net, tape, upstream, nullptr);
}

namespace {

Network init_net(int input_dim, int width, int depth, const ActivationKind& act,
                 std::mt19937_64& rng) {
  Network net;
  net.input_dim = std::size_t(input_dim);
  std::size_t prev = net.input_dim;
  for (int li = 0; li <= depth; ++li) {
    const std::size_t out = li == depth ? 1 : std::size_t(width);
    AffineLayer L(out, prev);
    const double s = 1.0 / std::sqrt(double(prev));
    std::uniform_real_distribution<double> dist(-s, s);
    for (auto& v : L.weights) v = dist(rng);
    for (auto& v : L.bias) v = dist(rng);
    net.layers.push_back(std::move(L));
    if (li < depth) net.hidden_activations.emplace_back(out, act);
    prev = out;
  }
  net.domain = Hypercube{std::vector<double>(input_dim, 0.0),
                         std::vector<double>(input_dim, 1.0)};
  return net;
}

struct Losses {
  double mse = 0.0, mae = 0.0, mx = 0.0;
};

Losses measure(const Network& net, const std::vector<std::vector<double>>& xs,
               const std::vector<double>& ys) {
  Losses l;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = eval(net, xs[i])[0] - ys[i];
    l.mse += e * e;
    l.mae += std::fabs(e);
    l.mx = std::max(l.mx, std::fabs(e));
  }
  l.mse /= double(xs.size());
  l.mae /= double(xs.size());
  return l;
}

}  // namespace

TrainResult train_toy(const std::function<double(std::span<const double>)>& target,
                      int input_dim, int width, int depth, const ActivationKind& act,
                      const TrainConfig& config) {
  if (width > 80 || depth > 4 || config.n_train > 100000)
    throw validation_error("train_toy: desk-scale sizes only (width<=80, depth<=4)");
  if (config.steps < 1 || config.batch < 1 || !(config.lr0 > 0.0))
    throw validation_error("train_toy: positive steps, batch, and rate required");

  std::mt19937_64 rng(config.seed);
  Network net = init_net(input_dim, width, depth, act, rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](int n) {
    std::vector<std::vector<double>> xs(n);
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i].resize(input_dim);
      for (int j = 0; j < input_dim; ++j) xs[i][j] = unit(rng);
      ys[i] = target(xs[i]);
    }
    return std::pair(std::move(xs), std::move(ys));
  };
  auto [train_x, train_y] = draw(config.n_train);
  auto [test_x, test_y] = draw(config.n_test);

  TrainResult result;
  result.initial_train_mse = measure(net, train_x, train_y).mse;

  auto record = [&](int step) {
    const Losses tr = measure(net, train_x, train_y);
    const Losses te = measure(net, test_x, test_y);
    result.trace.push_back({step, tr.mse, te.mse, te.mae, te.mx});
    return tr.mse;
  };
  record(0);

  std::vector<double> gsum(param_count(net));
  std::uniform_int_distribution<std::size_t> pick(0, train_x.size() - 1);
  for (int step = 1; step <= config.steps; ++step) {
    const double lr = config.lr0 * std::pow(config.decay, step / config.decay_period);
    std::fill(gsum.begin(), gsum.end(), 0.0);
    double batch_worst = 0.0;
    std::size_t worst_idx = 0;
    std::vector<std::size_t> batch(config.batch);
    for (int bi = 0; bi < config.batch; ++bi) batch[bi] = pick(rng);
    for (int bi = 0; bi < config.batch; ++bi) {
      const std::size_t i = batch[bi];
      const double out = eval(net, train_x[i])[0];
      const double e = out - train_y[i];
      double upstream = 0.0;
      switch (config.loss) {
        case Loss::MSE: upstream = 2.0 * e / double(config.batch); break;
        case Loss::MAE: upstream = (e >= 0.0 ? 1.0 : -1.0) / double(config.batch); break;
        case Loss::MAX:
          if (std::fabs(e) > batch_worst) {
            batch_worst = std::fabs(e);
            worst_idx = i;
          }
          continue;
      }
      const auto g = grad(net, train_x[i], upstream);
      for (std::size_t k = 0; k < g.size(); ++k) gsum[k] += g[k];
    }
    if (config.loss == Loss::MAX) {
      const double out = eval(net, train_x[worst_idx])[0];
      const double e = out - train_y[worst_idx];
      const auto g = grad(net, train_x[worst_idx], e >= 0.0 ? 1.0 : -1.0);
      for (std::size_t k = 0; k < g.size(); ++k) gsum[k] += g[k];
    }
    auto theta = get_params(net);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= lr * gsum[k];
    set_params(net, theta);

    if (step % config.trace_every == 0 || step == config.steps) {
      const double mse = record(step);
      if (!(mse < 1e6)) {
        result.diverged = true;
        break;
      }
    }
  }
  result.final_train_mse = result.trace.back().train_mse;
  result.network = std::move(net);
  return result;
}

}  // namespace euaf::autodiff
