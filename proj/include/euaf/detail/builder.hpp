#pragma once

#include <cstddef>
#include <vector>

#include "euaf/network.hpp"

namespace euaf::detail {

// Affine expression over the rows of the layer currently being consumed.
struct Expr {
  std::vector<double> w;
  double b = 0.0;

  Expr() = default;
  explicit Expr(std::size_t n, double bias = 0.0) : w(n, 0.0), b(bias) {}

  static Expr unit(std::size_t n, std::size_t row, double coeff = 1.0, double bias = 0.0) {
    Expr e(n, bias);
    e.w[row] = coeff;
    return e;
  }
};

// Incremental construction of a layered network.  Hidden layers are begun,
// filled with (expression, activation) neurons, then sealed; the final
// affine map closes the network.
class StackBuilder {
 public:
  explicit StackBuilder(std::size_t input_dim) : input_dim_(input_dim) {}

  std::size_t prev_width() const {
    return layers_.empty() ? input_dim_ : layers_.back().out_dim;
  }
  std::size_t cur_rows() const { return pending_.size(); }

  Expr expr() const { return Expr(prev_width()); }
  Expr unit(std::size_t row, double coeff = 1.0, double bias = 0.0) const {
    return Expr::unit(prev_width(), row, coeff, bias);
  }

  std::size_t add(const Expr& e, const ActivationKind& tag) {
    pending_.push_back(e);
    pending_tags_.push_back(tag);
    return pending_.size() - 1;
  }

  void seal_layer() {
    AffineLayer layer(pending_.size(), prev_width());
    for (std::size_t r = 0; r < pending_.size(); ++r) {
      for (std::size_t c = 0; c < layer.in_dim; ++c) layer.w(r, c) = pending_[r].w[c];
      layer.bias[r] = pending_[r].b;
    }
    layers_.push_back(std::move(layer));
    tags_.push_back(std::move(pending_tags_));
    pending_.clear();
    pending_tags_.clear();
  }

  Network finish(const std::vector<Expr>& outputs) {
    AffineLayer out(outputs.size(), prev_width());
    for (std::size_t r = 0; r < outputs.size(); ++r) {
      for (std::size_t c = 0; c < out.in_dim; ++c) out.w(r, c) = outputs[r].w[c];
      out.bias[r] = outputs[r].b;
    }
    Network net;
    net.input_dim = input_dim_;
    net.layers = std::move(layers_);
    net.layers.push_back(std::move(out));
    net.hidden_activations = std::move(tags_);
    return net;
  }

 private:
  std::size_t input_dim_;
  std::vector<AffineLayer> layers_;
  std::vector<std::vector<ActivationKind>> tags_;
  std::vector<Expr> pending_;
  std::vector<ActivationKind> pending_tags_;
};

}  // namespace euaf::detail
