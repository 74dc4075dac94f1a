#include "euaf/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace euaf {

void Network::validate() const {
  if (input_dim == 0) throw validation_error("network input_dim must be positive");
  if (layers.empty()) throw validation_error("network needs at least one affine layer");
  std::size_t prev = input_dim;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const AffineLayer& L = layers[i];
    if (L.in_dim != prev) {
      std::ostringstream os;
      os << "layer " << i << ": in_dim " << L.in_dim << " does not chain with previous dim "
         << prev;
      throw validation_error(os.str());
    }
    if (L.weights.size() != L.out_dim * L.in_dim || L.bias.size() != L.out_dim) {
      std::ostringstream os;
      os << "layer " << i << ": weight/bias storage does not match declared dims";
      throw validation_error(os.str());
    }
    prev = L.out_dim;
  }
  if (hidden_activations.size() != layers.size() - 1)
    throw validation_error("hidden_activations must have one entry per hidden layer");
  for (std::size_t i = 0; i + 1 < layers.size(); ++i)
    if (hidden_activations[i].size() != layers[i].out_dim) {
      std::ostringstream os;
      os << "layer " << i << ": activation tag count " << hidden_activations[i].size()
         << " != out_dim " << layers[i].out_dim;
      throw validation_error(os.str());
    }
  if (domain) {
    if (domain->lo.size() != input_dim || domain->hi.size() != input_dim)
      throw validation_error("domain box dims must equal input_dim");
  }
}

std::vector<double> eval(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim)
    throw validation_error("eval: input length does not match input_dim");
  std::vector<double> h(x.begin(), x.end()), nxt;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const AffineLayer& L = net.layers[li];
    nxt.assign(L.out_dim, 0.0);
    for (std::size_t r = 0; r < L.out_dim; ++r) {
      double v = L.bias[r];
      const double* wrow = &L.weights[r * L.in_dim];
      for (std::size_t c = 0; c < L.in_dim; ++c) v += wrow[c] * h[c];
      nxt[r] = v;
    }
    if (li + 1 < net.layers.size()) {
      const auto& tags = net.hidden_activations[li];
      for (std::size_t r = 0; r < L.out_dim; ++r) nxt[r] = eval(tags[r], nxt[r]);
    }
    h.swap(nxt);
  }
  return h;
}

double eval1(const Network& net, double x) {
  const double in[1] = {x};
  return eval(net, in)[0];
}

namespace {

// C = A * B as affine maps: (A, a) after (B, b)  ->  (A*B, A*b + a)
AffineLayer fuse_affine(const AffineLayer& outer, const AffineLayer& inner) {
  if (outer.in_dim != inner.out_dim)
    throw validation_error("compose: junction dimensions do not match");
  AffineLayer fused(outer.out_dim, inner.in_dim);
  for (std::size_t r = 0; r < outer.out_dim; ++r) {
    for (std::size_t c = 0; c < inner.in_dim; ++c) {
      double v = 0.0;
      for (std::size_t k = 0; k < inner.out_dim; ++k) v += outer.w(r, k) * inner.w(k, c);
      fused.w(r, c) = v;
    }
    double bv = outer.bias[r];
    for (std::size_t k = 0; k < inner.out_dim; ++k) bv += outer.w(r, k) * inner.bias[k];
    fused.bias[r] = bv;
  }
  return fused;
}

}  // namespace

Network compose(const Network& outer, const Network& inner,
                const std::optional<std::vector<ActivationKind>>& junction) {
  inner.validate();
  outer.validate();
  if (outer.input_dim != inner.output_dim())
    throw validation_error("compose: outer input_dim must equal inner output dim");

  Network out;
  out.input_dim = inner.input_dim;
  out.domain = inner.domain;
  out.layers.assign(inner.layers.begin(), inner.layers.end() - 1);
  out.hidden_activations = inner.hidden_activations;

  bool all_identity = true;
  if (junction) {
    if (junction->size() != inner.output_dim())
      throw validation_error("compose: junction tag count must equal inner output dim");
    for (const auto& t : *junction) all_identity = all_identity && t.tag == Act::Identity;
  }

  if (!junction || all_identity) {
    // fuse inner's output map with outer's first map
    out.layers.push_back(fuse_affine(outer.layers.front(), inner.layers.back()));
  } else {
    out.layers.push_back(inner.layers.back());
    out.hidden_activations.push_back(*junction);
    out.layers.push_back(outer.layers.front());
  }
  if (outer.layers.size() > 1) {
    out.hidden_activations.push_back(outer.hidden_activations.front());
    for (std::size_t i = 1; i < outer.layers.size(); ++i) {
      out.layers.push_back(outer.layers[i]);
      if (i + 1 < outer.layers.size())
        out.hidden_activations.push_back(outer.hidden_activations[i]);
    }
  }
  out.validate();
  return out;
}

namespace {

// Plain pass-through layers for values already inside [0,1], where the
// activation acts as the identity.
void append_chain_layers(std::vector<AffineLayer>& layers,
                         std::vector<std::vector<ActivationKind>>& tags,
                         std::size_t channels, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    AffineLayer L(channels, channels);
    for (std::size_t r = 0; r < channels; ++r) L.w(r, r) = 1.0;
    layers.push_back(std::move(L));
    tags.emplace_back(channels, ActivationKind::euaf());
  }
}

}  // namespace

Network parallel(const std::vector<Network>& nets, bool equalize_depth,
                 const std::vector<double>& range_bounds) {
  if (nets.empty()) throw validation_error("parallel: need at least one network");
  const std::size_t d = nets.front().input_dim;
  std::size_t max_depth = 0;
  for (const auto& n : nets) {
    n.validate();
    if (n.input_dim != d) throw validation_error("parallel: input dims differ");
    max_depth = std::max(max_depth, n.depth());
  }
  if (equalize_depth && range_bounds.size() != nets.size())
    throw validation_error("parallel: unknown range bound for identity padding");

  // Per net: materialize a copy padded to max_depth hidden layers.
  std::vector<Network> padded;
  padded.reserve(nets.size());
  for (std::size_t i = 0; i < nets.size(); ++i) {
    Network n = nets[i];
    const std::size_t missing = max_depth - n.depth();
    if (missing > 0) {
      if (!equalize_depth)
        throw validation_error("parallel: depths differ; pass equalize_depth");
      const double M = std::fabs(range_bounds[i]) + 1.0;
      const std::size_t ch = n.output_dim();
      AffineLayer out = n.layers.back();
      n.layers.pop_back();
      // entry layer maps the previous output affine through (t+M)/2M
      AffineLayer entry(ch, out.in_dim);
      for (std::size_t r = 0; r < ch; ++r) {
        for (std::size_t c = 0; c < out.in_dim; ++c) entry.w(r, c) = out.w(r, c) / (2.0 * M);
        entry.bias[r] = out.bias[r] / (2.0 * M) + 0.5;
      }
      n.layers.push_back(std::move(entry));
      n.hidden_activations.emplace_back(ch, ActivationKind::euaf());
      append_chain_layers(n.layers, n.hidden_activations, ch, missing - 1);
      // exit affine recovers 2M*h - M
      AffineLayer exit(ch, ch);
      for (std::size_t r = 0; r < ch; ++r) {
        exit.w(r, r) = 2.0 * M;
        exit.bias[r] = -M;
      }
      n.layers.push_back(std::move(exit));
      n.validate();
    }
    padded.push_back(std::move(n));
  }

  Network out;
  out.input_dim = d;
  const std::size_t L = max_depth + 1;
  for (std::size_t li = 0; li < L; ++li) {
    std::size_t in_dim = 0, out_dim = 0;
    for (const auto& n : padded) {
      in_dim += li == 0 ? 0 : n.layers[li - 1].out_dim;
      out_dim += n.layers[li].out_dim;
    }
    if (li == 0) in_dim = d;
    AffineLayer merged(out_dim, in_dim);
    std::vector<ActivationKind> tags;
    std::size_t row0 = 0, col0 = 0;
    for (const auto& n : padded) {
      const AffineLayer& B = n.layers[li];
      for (std::size_t r = 0; r < B.out_dim; ++r)
        for (std::size_t c = 0; c < B.in_dim; ++c)
          merged.w(row0 + r, li == 0 ? c : col0 + c) = B.w(r, c);
      for (std::size_t r = 0; r < B.out_dim; ++r) merged.bias[row0 + r] = B.bias[r];
      if (li + 1 < L)
        for (std::size_t r = 0; r < B.out_dim; ++r)
          tags.push_back(n.hidden_activations[li][r]);
      row0 += B.out_dim;
      col0 += li == 0 ? 0 : n.layers[li - 1].out_dim;
    }
    out.layers.push_back(std::move(merged));
    if (li + 1 < L) out.hidden_activations.push_back(std::move(tags));
  }
  out.validate();
  return out;
}

Network sum(const std::vector<Network>& nets, const std::vector<double>& coefficients,
            const std::vector<double>& range_bounds) {
  if (nets.size() != coefficients.size())
    throw validation_error("sum: one coefficient per network required");
  for (const auto& n : nets)
    if (n.output_dim() != 1) throw validation_error("sum: scalar outputs required");
  bool equalize = false;
  for (const auto& n : nets) equalize = equalize || n.depth() != nets.front().depth();
  Network stacked = parallel(nets, equalize, equalize ? range_bounds : std::vector<double>{});
  AffineLayer row(1, stacked.output_dim());
  for (std::size_t i = 0; i < coefficients.size(); ++i) row.w(0, i) = coefficients[i];
  AffineLayer fused = fuse_affine(row, stacked.layers.back());
  stacked.layers.back() = std::move(fused);
  stacked.validate();
  return stacked;
}

ParamCount count_params(const Network& net) {
  ParamCount pc;
  for (const auto& L : net.layers) {
    pc.total += L.out_dim * L.in_dim + L.out_dim;
    for (double v : L.weights) pc.nonzero += std::fabs(v) > 0.0 ? 1 : 0;
    for (double v : L.bias) pc.nonzero += std::fabs(v) > 0.0 ? 1 : 0;
  }
  return pc;
}

}  // namespace euaf
