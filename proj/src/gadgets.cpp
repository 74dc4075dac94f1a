#include "euaf/gadgets.hpp"

#include <cmath>

#include "euaf/detail/builder.hpp"
#include "euaf/detail/euaf_blocks.hpp"

namespace euaf::gadgets {

using detail::Expr;
using detail::StackBuilder;

namespace {

const ActivationKind kEuaf = ActivationKind::euaf();

using detail::emit_square_a;
using detail::emit_square_b;
using detail::square_value;
using detail::SquareA;
using detail::SquareB;

}  // namespace

Network square_net() {
  StackBuilder sb(1);
  Expr x(1);
  x.w[0] = 1.0;
  SquareA a = emit_square_a(sb, x);
  sb.seal_layer();
  SquareB b = emit_square_b(sb, a);
  sb.seal_layer();
  Network net = sb.finish({square_value(sb, b)});
  net.domain = Hypercube{{-1.0}, {1.0}};
  return net;
}

Network product_net(double M) {
  if (!(M > 0.0)) throw validation_error("product_net: M must be positive");
  StackBuilder sb(2);
  Expr x(2), y(2), s(2);
  x.w[0] = 1.0 / (2.0 * M);
  y.w[1] = 1.0 / (2.0 * M);
  s.w[0] = 1.0 / (2.0 * M);
  s.w[1] = 1.0 / (2.0 * M);
  SquareA a1 = emit_square_a(sb, s);
  SquareA a2 = emit_square_a(sb, x);
  SquareA a3 = emit_square_a(sb, y);
  sb.seal_layer();
  SquareB b1 = emit_square_b(sb, a1);
  SquareB b2 = emit_square_b(sb, a2);
  SquareB b3 = emit_square_b(sb, a3);
  sb.seal_layer();
  Expr out = sb.expr();
  const double c = 2.0 * M * M;
  Expr v1 = square_value(sb, b1), v2 = square_value(sb, b2), v3 = square_value(sb, b3);
  for (std::size_t i = 0; i < out.w.size(); ++i)
    out.w[i] = c * (v1.w[i] - v2.w[i] - v3.w[i]);
  Network net = sb.finish({out});
  net.domain = Hypercube{{-M, -M}, {M, M}};
  return net;
}

Network step_encode_net(int K) {
  if (K < 1) throw validation_error("step_encode_net: K must be >= 1");
  StackBuilder sb(1);
  Expr wave(1);
  wave.w[0] = 2.0 * K;
  std::size_t r_wave = sb.add(wave, kEuaf);
  Expr pass(1);
  pass.w[0] = 1.0;
  std::size_t r_x = sb.add(pass, ActivationKind::identity());
  sb.seal_layer();
  // psi(2Kx)/2 + 1 = K*x - sigma(2Kx)/2 + 1
  Expr out = sb.expr();
  out.w[r_wave] = -0.5;
  out.w[r_x] = static_cast<double>(K);
  out.b = 1.0;
  Network net = sb.finish({out});
  net.domain = Hypercube{{0.0}, {1.0}};
  return net;
}

Network partition_component_net(int K, int i) {
  if (K < 10) throw validation_error("partition_component_net: K must be >= 10");
  if (i < 1 || i > 4) throw validation_error("partition_component_net: i must be in 1..4");
  StackBuilder sb(1);
  // y = 2Kx + i/2 stays in [0, 2K] on x in [0, 9/10]
  const double P = 2.0 * K + 1.0;
  Expr scaled(1), plain(1);
  scaled.w[0] = 2.0 * K / P;
  scaled.b = (0.5 * i + 1.0) / P;
  plain.w[0] = 2.0 * K;
  plain.b = 0.5 * i + 1.0;
  std::size_t r_scaled = sb.add(scaled, kEuaf);
  std::size_t r_plain = sb.add(plain, kEuaf);
  sb.seal_layer();
  Expr inner = sb.expr();
  inner.w[r_scaled] = P;
  inner.w[r_plain] = -1.0;
  std::size_t r_psi = sb.add(inner, kEuaf);
  sb.seal_layer();
  Network net = sb.finish({sb.unit(r_psi)});
  net.domain = Hypercube{{0.0}, {0.9}};
  return net;
}

Network snap_net(double M) {
  if (!(M > 0.0)) throw validation_error("snap_net: M must be positive");
  StackBuilder sb(1);
  Expr scaled(1), shifted(1);
  scaled.w[0] = 1.0 / M;
  shifted.w[0] = 1.0;
  shifted.b = 1.5;
  std::size_t r0 = sb.add(scaled, kEuaf);
  std::size_t r1 = sb.add(shifted, kEuaf);
  sb.seal_layer();
  Expr out = sb.expr();
  out.w[r0] = M;
  out.w[r1] = -1.0;
  out.b = 0.5;
  Network net = sb.finish({out});
  net.domain = Hypercube{{0.0}, {M}};
  return net;
}

Network identity_widen_net(double M, int depth) {
  if (!(M > 0.0)) throw validation_error("identity_widen_net: M must be positive");
  if (depth < 1) throw validation_error("identity_widen_net: depth must be >= 1");
  StackBuilder sb(1);
  Expr entry(1);
  entry.w[0] = 1.0 / (2.0 * M);
  entry.b = 0.5;
  std::size_t r = sb.add(entry, kEuaf);
  sb.seal_layer();
  for (int k = 1; k < depth; ++k) {
    r = sb.add(sb.unit(r), kEuaf);
    sb.seal_layer();
  }
  Network net = sb.finish({sb.unit(r, 2.0 * M, -M)});
  net.domain = Hypercube{{-M}, {M}};
  return net;
}

MagnitudeReducedAffine magnitude_reduced_affine(double a, double b, double range_bound) {
  if (!(a >= 1.0 && b >= 1.0))
    throw validation_error("magnitude_reduced_affine: a and b must be >= 1");
  if (!(range_bound > 0.0))
    throw validation_error("magnitude_reduced_affine: range bound must be positive");
  const double R = range_bound;
  StackBuilder sb(1);
  Expr in(1);
  in.w[0] = 1.0 / (2.0 * R);
  in.b = 0.5;
  std::size_t r_x = sb.add(in, kEuaf);  // (x+R)/2R in [0,1]
  sb.seal_layer();
  // a*x + b = sqrt(2aR)*sqrt(2aR)*x~ + sqrt(b)*sqrt(b) - sqrt(aR)*sqrt(aR)
  const double wa = std::sqrt(2.0 * a * R);
  const double wb = std::sqrt(b);
  const double wc = std::sqrt(a * R);
  std::size_t r_a = sb.add(sb.unit(r_x, wa), ActivationKind::identity());
  Expr const_b = sb.expr();
  const_b.b = wb;
  std::size_t r_b = sb.add(const_b, ActivationKind::identity());
  Expr const_c = sb.expr();
  const_c.b = wc;
  std::size_t r_c = sb.add(const_c, ActivationKind::identity());
  sb.seal_layer();
  Expr out = sb.expr();
  out.w[r_a] = wa;
  out.w[r_b] = wb;
  out.w[r_c] = -wc;
  MagnitudeReducedAffine result;
  result.network = sb.finish({out});
  result.network.domain = Hypercube{{-R}, {R}};
  result.c0 = std::max({std::sqrt(2.0 * R), 1.0, 1.0 / (2.0 * R)});
  for (const auto& L : result.network.layers) {
    for (double v : L.weights) result.max_parameter = std::max(result.max_parameter, std::fabs(v));
    for (double v : L.bias) result.max_parameter = std::max(result.max_parameter, std::fabs(v));
  }
  return result;
}

Network build(const GadgetSpec& spec) {
  switch (spec.kind) {
    case GadgetSpec::Kind::Square: return square_net();
    case GadgetSpec::Kind::Product: return product_net(spec.M);
    case GadgetSpec::Kind::StepNet: return step_encode_net(spec.K);
    case GadgetSpec::Kind::PartitionComponent:
      return partition_component_net(spec.K, spec.component);
    case GadgetSpec::Kind::IdentityWiden: return identity_widen_net(spec.M, spec.depth);
    case GadgetSpec::Kind::SnapNet: return snap_net(spec.M);
    case GadgetSpec::Kind::MagnitudeReduced:
      return magnitude_reduced_affine(spec.a, spec.b, spec.range_bound).network;
  }
  throw validation_error("unknown gadget kind");
}

}  // namespace euaf::gadgets
