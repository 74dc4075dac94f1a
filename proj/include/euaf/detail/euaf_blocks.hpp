#pragma once

#include "euaf/detail/builder.hpp"

namespace euaf::detail {

// Two-layer x^2 block:
//   z^2 = 12*sigma(1 - 12*sigma(-z-1) + 12*sigma(-z-2)) + 11*sigma((6-5z)/11)
// for z in [-1, 1].  (6-5z)/11 lies in [1/11, 1] where sigma is the
// identity, so the second layer carries it through another sigma neuron.
struct SquareA {
  std::size_t neg1, neg2, lin;
};
struct SquareB {
  std::size_t head, lin;
};

inline SquareA emit_square_a(StackBuilder& sb, const Expr& z) {
  const ActivationKind kEuaf = ActivationKind::euaf();
  Expr e1 = z, e2 = z, e3 = z;
  for (auto& v : e1.w) v = -v;
  e1.b = -z.b - 1.0;
  for (auto& v : e2.w) v = -v;
  e2.b = -z.b - 2.0;
  for (auto& v : e3.w) v *= -5.0 / 11.0;
  e3.b = (6.0 - 5.0 * z.b) / 11.0;
  return {sb.add(e1, kEuaf), sb.add(e2, kEuaf), sb.add(e3, kEuaf)};
}

inline SquareB emit_square_b(StackBuilder& sb, const SquareA& a) {
  const ActivationKind kEuaf = ActivationKind::euaf();
  Expr head = sb.expr();
  head.w[a.neg1] = -12.0;
  head.w[a.neg2] = 12.0;
  head.b = 1.0;
  return {sb.add(head, kEuaf), sb.add(sb.unit(a.lin), kEuaf)};
}

inline Expr square_value(const StackBuilder& sb, const SquareB& b) {
  Expr v = sb.expr();
  v.w[b.head] = 12.0;
  v.w[b.lin] = 11.0;
  return v;
}

// Product block over two layers: x*y = 2M^2 (((x+y)/2M)^2 - (x/2M)^2 - (y/2M)^2)
// for |x|, |y| <= M.
struct ProductA {
  SquareA s1, s2, s3;
};
struct ProductB {
  SquareB s1, s2, s3;
};

inline ProductA emit_product_a(StackBuilder& sb, const Expr& x, const Expr& y, double M) {
  Expr z1(x.w.size()), z2 = x, z3 = y;
  for (std::size_t i = 0; i < x.w.size(); ++i) z1.w[i] = (x.w[i] + y.w[i]) / (2.0 * M);
  z1.b = (x.b + y.b) / (2.0 * M);
  for (auto& v : z2.w) v /= 2.0 * M;
  z2.b = x.b / (2.0 * M);
  for (auto& v : z3.w) v /= 2.0 * M;
  z3.b = y.b / (2.0 * M);
  return {emit_square_a(sb, z1), emit_square_a(sb, z2), emit_square_a(sb, z3)};
}

inline ProductB emit_product_b(StackBuilder& sb, const ProductA& a) {
  return {emit_square_b(sb, a.s1), emit_square_b(sb, a.s2), emit_square_b(sb, a.s3)};
}

inline Expr product_value(const StackBuilder& sb, const ProductB& b, double M) {
  const double c = 2.0 * M * M;
  Expr v1 = square_value(sb, b.s1), v2 = square_value(sb, b.s2), v3 = square_value(sb, b.s3);
  Expr out = sb.expr();
  for (std::size_t i = 0; i < out.w.size(); ++i) out.w[i] = c * (v1.w[i] - v2.w[i] - v3.w[i]);
  return out;
}

}  // namespace euaf::detail
