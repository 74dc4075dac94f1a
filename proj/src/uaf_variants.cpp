#include "euaf/uaf_variants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "euaf/detail/builder.hpp"
#include "euaf/network.hpp"

namespace euaf::uaf {

namespace {

// Antiderivative of (alpha*t + beta)/(2t+1)^2:
//   (alpha/4) ln(2t+1) + (alpha - 2 beta) / (4 (2t+1))
double rational_antiderivative(double alpha, double beta, double t) {
  const double u = 2.0 * t + 1.0;
  return 0.25 * alpha * std::log(u) + (alpha - 2.0 * beta) / (4.0 * u);
}

// On [m, m+1] the base activation is t-m (even m) or (m+1)-t (odd m), so
// scale*sigma(t) + shift has the (alpha, beta) form above.
void segment_coeffs(long m, double scale, double shift, double* alpha, double* beta) {
  if (m % 2 == 0) {
    *alpha = scale;
    *beta = shift - scale * static_cast<double>(m);
  } else {
    *alpha = -scale;
    *beta = shift + scale * static_cast<double>(m + 1);
  }
}

double segment_integral(long m, double scale, double shift) {
  double alpha, beta;
  segment_coeffs(m, scale, shift, &alpha, &beta);
  return rational_antiderivative(alpha, beta, static_cast<double>(m + 1)) -
         rational_antiderivative(alpha, beta, static_cast<double>(m));
}

}  // namespace

double compute_c(long segments) {
  if (segments < 2) throw std::domain_error("compute_c: need at least 2 segments");
  // Sum small-magnitude far segments first.
  long double acc = 0.0L;
  for (long m = segments - 1; m >= 0; --m) acc += segment_integral(m, 1.0, 0.0);
  // Midline tail: integral_X^inf (1/2)/(2t+1)^2 dt; the oscillatory remainder
  // is bounded by 1/(8 (2X+1)^2).
  const double X = static_cast<double>(segments);
  acc += 1.0L / (4.0L * (2.0L * X + 1.0L));
  return 1.0 / (2.0 * static_cast<double>(acc));
}

namespace {

constexpr long kSigmoidalTableMax = 4096;

struct SigmoidalCache {
  double c = 0.0;
  std::vector<double> cum;  // cum[m] = value at integer m, m = 0..kSigmoidalTableMax

  SigmoidalCache() {
    c = compute_c();
    cum.resize(kSigmoidalTableMax + 1);
    cum[0] = 0.0;
    for (long m = 0; m < kSigmoidalTableMax; ++m)
      cum[m + 1] = cum[m] + segment_integral(m, c, 1.0);
  }

  // (c/2 + 1)/(2 (2z+1)): midline tail mass beyond z, exact up to the
  // oscillatory remainder 1/(8 (2z+1)^2).
  double tail(double z) const { return (0.5 * c + 1.0) / (2.0 * (2.0 * z + 1.0)); }

  double positive_eval(double x) const {
    if (x > static_cast<double>(kSigmoidalTableMax)) {
      const double z0 = static_cast<double>(kSigmoidalTableMax);
      return cum.back() + tail(z0) - tail(x);
    }
    const long m = std::min(static_cast<long>(std::floor(x)), kSigmoidalTableMax - 1);
    double alpha, beta;
    segment_coeffs(m, c, 1.0, &alpha, &beta);
    return cum[m] + rational_antiderivative(alpha, beta, x) -
           rational_antiderivative(alpha, beta, static_cast<double>(m));
  }
};

const SigmoidalCache& sigmoidal_cache() {
  static const SigmoidalCache cache;
  return cache;
}

}  // namespace

double eval_sigmoidal(double x) {
  if (!std::isfinite(x)) throw std::domain_error("eval_sigmoidal: non-finite input");
  if (x <= 0.0) return x / (1.0 - x);
  return sigmoidal_cache().positive_eval(x);
}

double sigmoidal_derivative(double x) {
  if (!std::isfinite(x)) throw std::domain_error("sigmoidal_derivative: non-finite input");
  if (x < 0.0) {
    const double d = 1.0 - x;
    return 1.0 / (d * d);
  }
  const double s = tri_wave(x);
  const double u = 2.0 * x + 1.0;
  return (sigmoidal_cache().c * s + 1.0) / (u * u);
}

namespace {

// -------- repeatedly integrated activation --------

constexpr long kSmoothSegments = static_cast<long>(kSmoothTableMax);

// Positive side: per level, polynomial coefficients in local u = x - m on
// each [m, m+1], constant term = accumulated value at m.
struct SmoothCache {
  // pos[level][m] = coefficients (degree level+1); level 1..kMaxSmoothDepth
  std::array<std::vector<std::array<double, kMaxSmoothDepth + 2>>, kMaxSmoothDepth + 1> pos;
  // Negative side: value = P(u) + Q(u) ln u with u = 1 - x, level >= 1.
  std::array<std::vector<double>, kMaxSmoothDepth + 1> negP, negQ;

  SmoothCache() {
    // level 0 on [m, m+1]: u (m even) or 1-u (m odd)
    std::vector<std::array<double, kMaxSmoothDepth + 2>> cur(kSmoothSegments);
    for (long m = 0; m < kSmoothSegments; ++m) {
      cur[m].fill(0.0);
      if (m % 2 == 0) {
        cur[m][1] = 1.0;
      } else {
        cur[m][0] = 1.0;
        cur[m][1] = -1.0;
      }
    }
    for (int level = 1; level <= kMaxSmoothDepth; ++level) {
      std::vector<std::array<double, kMaxSmoothDepth + 2>> next(kSmoothSegments);
      double running = 0.0;  // value at the left endpoint
      for (long m = 0; m < kSmoothSegments; ++m) {
        next[m].fill(0.0);
        next[m][0] = running;
        for (int k = 0; k <= level; ++k) next[m][k + 1] = cur[m][k] / (k + 1);
        double at_one = 0.0;
        for (int k = level + 1; k >= 0; --k) at_one = at_one + next[m][k];
        running = at_one;
      }
      pos[level] = std::move(next);
      cur = pos[level];
    }

    // Negative side.  Level 1 is closed-form: (u - 1) - ln u.
    negP[1] = {-1.0, 1.0};
    negQ[1] = {-1.0};
    for (int level = 2; level <= kMaxSmoothDepth; ++level) {
      const auto& P = negP[level - 1];
      const auto& Q = negQ[level - 1];
      // rho_{level}(x) = A(1) - A(u), A = antiderivative of P + Q ln in u
      std::vector<double> iP(P.size() + 1, 0.0), iQ(Q.size() + 1, 0.0);
      for (std::size_t j = 0; j < P.size(); ++j) iP[j + 1] += P[j] / double(j + 1);
      for (std::size_t j = 0; j < Q.size(); ++j) {
        iQ[j + 1] += Q[j] / double(j + 1);
        iP[j + 1] -= Q[j] / (double(j + 1) * double(j + 1));
      }
      double at_one = 0.0;
      for (double v : iP) at_one += v;  // ln(1) = 0 kills the iQ part
      std::vector<double> newP(iP.size()), newQ(iQ.size());
      for (std::size_t j = 0; j < iP.size(); ++j) newP[j] = -iP[j];
      newP[0] += at_one;
      for (std::size_t j = 0; j < iQ.size(); ++j) newQ[j] = -iQ[j];
      negP[level] = std::move(newP);
      negQ[level] = std::move(newQ);
    }
  }

  double eval(int s, double x) const {
    if (x >= 0.0) {
      if (x > kSmoothTableMax) {
        // periodic closed forms continue the first two levels to any x:
        //   rho_1(2m+u) = m + rho_1(u)
        //   rho_2(2m+u) = m*rho_2(2) + m(m-1) + m*u + rho_2(u)
        const double m = std::floor(0.5 * x);
        const double u = x - 2.0 * m;
        if (s == 1) return m + eval(1, u);
        if (s == 2) return m * eval(2, 2.0) + m * (m - 1.0) + m * u + eval(2, u);
        throw std::domain_error("eval_smooth: input beyond the cached positive range");
      }
      const long m = std::min(static_cast<long>(std::floor(x)), kSmoothSegments - 1);
      const double u = x - static_cast<double>(m);
      const auto& cf = pos[s][m];
      double v = 0.0;
      for (int k = s + 1; k >= 0; --k) v = v * u + cf[k];
      return v;
    }
    const double u = 1.0 - x;
    const double lg = std::log(u);
    double p = 0.0, q = 0.0;
    const auto& P = negP[s];
    const auto& Q = negQ[s];
    for (std::size_t j = P.size(); j-- > 0;) p = p * u + P[j];
    for (std::size_t j = Q.size(); j-- > 0;) q = q * u + Q[j];
    return p + q * lg;
  }
};

const SmoothCache& smooth_cache() {
  static const SmoothCache cache;
  return cache;
}

void check_smooth_depth(int s) {
  if (s < 1 || s > kMaxSmoothDepth)
    throw std::domain_error("smooth depth s must lie in 1..4");
}

}  // namespace

double eval_smooth(int s, double x) {
  check_smooth_depth(s);
  if (!std::isfinite(x)) throw std::domain_error("eval_smooth: non-finite input");
  return smooth_cache().eval(s, x);
}

double smooth_derivative(int s, double x) {
  check_smooth_depth(s);
  if (!std::isfinite(x)) throw std::domain_error("smooth_derivative: non-finite input");
  if (s == 1) return x >= 0.0 ? tri_wave(x) : softsign(x);
  return smooth_cache().eval(s - 1, x);
}

// -------- activation substitution --------

namespace {

std::vector<std::vector<double>> substitution_grid(const Network& net, double bound,
                                                   int points) {
  const std::size_t d = net.input_dim;
  std::vector<double> lo(d, -bound), hi(d, bound);
  if (net.domain) {
    lo = net.domain->lo;
    hi = net.domain->hi;
  }
  std::vector<std::vector<double>> grid;
  grid.reserve(points);
  if (d == 1) {
    for (int i = 0; i < points; ++i) {
      const double t = points == 1 ? 0.5 : double(i) / double(points - 1);
      grid.push_back({lo[0] + t * (hi[0] - lo[0])});
    }
    return grid;
  }
  // Halton points for multi-dimensional domains.
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  for (int i = 1; i <= points; ++i) {
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) {
      const int base = primes[j % 8];
      double f = 1.0, r = 0.0;
      for (int n = i; n > 0; n /= base) {
        f /= base;
        r += f * (n % base);
      }
      x[j] = lo[j] + r * (hi[j] - lo[j]);
    }
    grid.push_back(std::move(x));
  }
  return grid;
}

double forward_with(const Network& net, std::span<const double> x,
                    const std::function<double(double)>& act) {
  std::vector<double> h(x.begin(), x.end()), nxt;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const AffineLayer& L = net.layers[li];
    nxt.assign(L.out_dim, 0.0);
    for (std::size_t r = 0; r < L.out_dim; ++r) {
      double v = L.bias[r];
      for (std::size_t c = 0; c < L.in_dim; ++c) v += L.w(r, c) * h[c];
      nxt[r] = li + 1 < net.layers.size() ? act(v) : v;
    }
    h.swap(nxt);
  }
  return h[0];
}

}  // namespace

SubstitutionResult substitute_activation(
    const Network& net,
    const std::function<std::function<double(double)>(double)>& approximant,
    double domain_bound, double epsilon, int grid_points) {
  net.validate();
  for (const auto& layer_tags : net.hidden_activations)
    for (const auto& t : layer_tags)
      if (t.tag != Act::Euaf)
        throw validation_error("substitute_activation: all hidden activations must be euaf");
  if (net.output_dim() != 1)
    throw validation_error("substitute_activation: scalar output expected");

  const auto grid = substitution_grid(net, domain_bound, grid_points);
  std::vector<double> reference(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) reference[i] = eval(net, grid[i])[0];

  SubstitutionResult result;
  double delta = 1.0;
  while (delta >= 1e-12) {
    auto act = approximant(delta);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      sup = std::max(sup, std::fabs(forward_with(net, grid[i], act) - reference[i]));
    if (sup < result.sup_difference || result.delta == 0.0) {
      result.sup_difference = sup;
      result.delta = delta;
    }
    if (sup < 0.5 * epsilon) {
      result.delta = delta;
      result.sup_difference = sup;
      result.converged = true;
      auto layers_copy = net;
      result.evaluator = [layers_copy, act](const std::vector<double>& x) {
        return forward_with(layers_copy, x, act);
      };
      return result;
    }
    delta *= 0.5;
  }
  return result;  // converged == false, best delta/sup recorded
}

// -------- sigmoidal reproduction of the base activation --------

namespace {

using detail::Expr;
using detail::StackBuilder;

const ActivationKind kSig = ActivationKind::sigmoidal();

// Rows emitted at the first of a square's two layers.
struct SquareRowsA {
  std::size_t neg4, neg5, pass;
};
// Rows at the second layer; value = 90*head - (11/w_id)*pass + 60.
struct SquareRowsB {
  std::size_t head, pass;
};

SquareRowsA emit_square_a(StackBuilder& sb, const Expr& z, double w_id) {
  Expr e1 = z, e2 = z, e3 = z;
  for (auto& v : e1.w) v = -v;
  e1.b = -z.b - 4.0;
  for (auto& v : e2.w) v = -v;
  e2.b = -z.b - 5.0;
  for (auto& v : e3.w) v *= w_id;
  e3.b = z.b * w_id;
  SquareRowsA rows;
  rows.neg4 = sb.add(e1, kSig);
  rows.neg5 = sb.add(e2, kSig);
  rows.pass = sb.add(e3, kSig);
  return rows;
}

SquareRowsB emit_square_b(StackBuilder& sb, const SquareRowsA& a) {
  Expr head = sb.expr();
  head.w[a.neg4] = -90.0;
  head.w[a.neg5] = 90.0;
  head.b = 1.0;
  Expr pass = sb.unit(a.pass);
  SquareRowsB rows;
  rows.head = sb.add(head, kSig);
  rows.pass = sb.add(pass, kSig);
  return rows;
}

Expr square_value(const StackBuilder& sb, const SquareRowsB& b, double w_id) {
  Expr v = sb.expr();
  v.w[b.head] = 90.0;
  v.w[b.pass] = -11.0 / w_id;
  v.b = 60.0;
  return v;
}

struct ProductRowsA {
  SquareRowsA s1, s2, s3;
};
struct ProductRowsB {
  SquareRowsB s1, s2, s3;
};

// xy for |x|,|y| <= 4B via 2B^2 ((x+y)/2B)^2 - (x/2B)^2 - (y/2B)^2).
ProductRowsA emit_product_a(StackBuilder& sb, const Expr& x, const Expr& y, double B,
                            double w_id) {
  Expr z1 = x, z2 = x, z3 = y;
  for (std::size_t i = 0; i < z1.w.size(); ++i) z1.w[i] = (x.w[i] + y.w[i]) / (2.0 * B);
  z1.b = (x.b + y.b) / (2.0 * B);
  for (auto& v : z2.w) v /= 2.0 * B;
  z2.b = x.b / (2.0 * B);
  for (auto& v : z3.w) v /= 2.0 * B;
  z3.b = y.b / (2.0 * B);
  return {emit_square_a(sb, z1, w_id), emit_square_a(sb, z2, w_id),
          emit_square_a(sb, z3, w_id)};
}

ProductRowsB emit_product_b(StackBuilder& sb, const ProductRowsA& a) {
  return {emit_square_b(sb, a.s1), emit_square_b(sb, a.s2), emit_square_b(sb, a.s3)};
}

Expr product_value(const StackBuilder& sb, const ProductRowsB& b, double B, double w_id) {
  Expr v = sb.expr();
  const double s = 2.0 * B * B;
  v.w[b.s1.head] += s * 90.0;
  v.w[b.s2.head] -= s * 90.0;
  v.w[b.s3.head] -= s * 90.0;
  v.w[b.s1.pass] += s * -11.0 / w_id;
  v.w[b.s2.pass] -= s * -11.0 / w_id;
  v.w[b.s3.pass] -= s * -11.0 / w_id;
  v.b = s * (60.0 - 60.0 - 60.0);
  return v;
}

// Four-layer block approximating the base activation at argument y(x)
// (an affine of the input), valid for y in [-M, M].
struct PsiDeltaRows {
  SquareRowsA sq_a;     // layer 1
  std::size_t qa, qb;   // layer 1: sigma~(y+delta), sigma~(y)
  SquareRowsB sq_b;     // layer 2
  std::size_t qpass;    // layer 2
  ProductRowsA prod_a;  // layer 3
  ProductRowsB prod_b;  // layer 4
};

void psi_delta_layer1(StackBuilder& sb, const Expr& y, double M, double delta, double w_id,
                      PsiDeltaRows* rows) {
  Expr z = y;
  for (auto& v : z.w) v = 2.0 * v / (2.0 * M + 1.0);
  z.b = (2.0 * y.b + 1.0) / (2.0 * M + 1.0);
  rows->sq_a = emit_square_a(sb, z, w_id);
  Expr yd = y;
  yd.b += delta;
  rows->qa = sb.add(yd, kSig);
  rows->qb = sb.add(y, kSig);
}

void psi_delta_layer2(StackBuilder& sb, double delta, double w_id, PsiDeltaRows* rows) {
  rows->sq_b = emit_square_b(sb, rows->sq_a);
  Expr q = sb.expr();
  q.w[rows->qa] = w_id / delta;
  q.w[rows->qb] = -w_id / delta;
  rows->qpass = sb.add(q, kSig);
}

void psi_delta_layer3(StackBuilder& sb, double Mt, double w_id, PsiDeltaRows* rows) {
  Expr p = square_value(sb, rows->sq_b, w_id);  // psi_1 = ((2y+1)/(2M+1))^2
  Expr q = sb.unit(rows->qpass, 1.0 / w_id);
  rows->prod_a = emit_product_a(sb, p, q, Mt, w_id);
}

void psi_delta_layer4(StackBuilder& sb, PsiDeltaRows* rows) {
  rows->prod_b = emit_product_b(sb, rows->prod_a);
}

Expr psi_delta_value(const StackBuilder& sb, const PsiDeltaRows& rows, double M, double Mt,
                     double c, double w_id) {
  Expr gamma = product_value(sb, rows.prod_b, Mt, w_id);
  const double scale = (2.0 * M + 1.0) * (2.0 * M + 1.0) / c;
  for (auto& v : gamma.w) v *= scale;
  gamma.b = gamma.b * scale - 1.0 / c;
  return gamma;
}

Network build_sigma_approx_net(double M, double delta, double eta0, double w_id) {
  const double c = sigmoidal_cache().c;
  const double Mt = (M + 1.0) * (M + 1.0);
  StackBuilder sb(1);

  PsiDeltaRows top;    // psi_delta at y = x
  PsiDeltaRows g1[2];  // g~ at x and x - eta0 (for g_delta)
  PsiDeltaRows g2[2];  // duplicate pair (for 1 - g_delta)
  std::size_t g1_xpass[2], g2_xpass[2];
  std::size_t schan;

  auto y_of = [&](double shift) {
    Expr y(1);
    y.w[0] = 1.0 / (M + 1.0);
    y.b = 1.0 - shift / (M + 1.0);
    return y;
  };

  // layer 1
  {
    Expr x(1);
    x.w[0] = 1.0;
    psi_delta_layer1(sb, x, M, delta, w_id, &top);
    for (int i = 0; i < 2; ++i) {
      const double shift = i == 0 ? 0.0 : eta0;
      psi_delta_layer1(sb, y_of(shift), M, delta, w_id, &g1[i]);
      Expr xp(1);
      xp.w[0] = w_id;
      xp.b = -shift * w_id;
      g1_xpass[i] = sb.add(xp, kSig);
    }
    for (int i = 0; i < 2; ++i) {
      const double shift = i == 0 ? 0.0 : eta0;
      psi_delta_layer1(sb, y_of(shift), M, delta, w_id, &g2[i]);
      Expr xp(1);
      xp.w[0] = w_id;
      xp.b = -shift * w_id;
      g2_xpass[i] = sb.add(xp, kSig);
    }
    Expr x2(1);
    x2.w[0] = 1.0;
    schan = sb.add(x2, kSig);
    sb.seal_layer();
  }

  // layer 2
  {
    psi_delta_layer2(sb, delta, w_id, &top);
    for (int i = 0; i < 2; ++i) {
      psi_delta_layer2(sb, delta, w_id, &g1[i]);
      g1_xpass[i] = sb.add(sb.unit(g1_xpass[i]), kSig);
    }
    for (int i = 0; i < 2; ++i) {
      psi_delta_layer2(sb, delta, w_id, &g2[i]);
      g2_xpass[i] = sb.add(sb.unit(g2_xpass[i]), kSig);
    }
    schan = sb.add(sb.unit(schan, w_id), kSig);
    sb.seal_layer();
  }

  // layer 3
  {
    psi_delta_layer3(sb, Mt, w_id, &top);
    for (int i = 0; i < 2; ++i) {
      psi_delta_layer3(sb, Mt, w_id, &g1[i]);
      g1_xpass[i] = sb.add(sb.unit(g1_xpass[i]), kSig);
    }
    for (int i = 0; i < 2; ++i) {
      psi_delta_layer3(sb, Mt, w_id, &g2[i]);
      g2_xpass[i] = sb.add(sb.unit(g2_xpass[i]), kSig);
    }
    schan = sb.add(sb.unit(schan), kSig);
    sb.seal_layer();
  }

  // layer 4
  {
    psi_delta_layer4(sb, &top);
    for (int i = 0; i < 2; ++i) {
      psi_delta_layer4(sb, &g1[i]);
      g1_xpass[i] = sb.add(sb.unit(g1_xpass[i]), kSig);
    }
    for (int i = 0; i < 2; ++i) {
      psi_delta_layer4(sb, &g2[i]);
      g2_xpass[i] = sb.add(sb.unit(g2_xpass[i]), kSig);
    }
    schan = sb.add(sb.unit(schan), kSig);
    sb.seal_layer();
  }

  // g~(x) = x/2 + (M+1)/2 (1 - psi_delta(y(x))); the ramp divides the shifted pair.
  auto g_tilde = [&](const PsiDeltaRows& rows, std::size_t xpass, double shift) {
    Expr psi = psi_delta_value(sb, rows, M, Mt, c, w_id);
    Expr g = psi;
    for (auto& v : g.w) v *= -(M + 1.0) / 2.0;
    g.b = -(M + 1.0) / 2.0 * psi.b + (M + 1.0) / 2.0;
    g.w[xpass] += 0.5 / w_id;  // pass carries x - shift already
    (void)shift;
    return g;
  };

  auto combine = [](Expr a, const Expr& b, double ca, double cb, double bias) {
    for (std::size_t i = 0; i < a.w.size(); ++i) a.w[i] = ca * a.w[i] + cb * b.w[i];
    a.b = ca * a.b + cb * b.b + bias;
    return a;
  };

  Expr psi_top = psi_delta_value(sb, top, M, Mt, c, w_id);
  Expr gd = combine(g_tilde(g1[0], g1_xpass[0], 0.0), g_tilde(g1[1], g1_xpass[1], eta0),
                    1.0 / eta0, -1.0 / eta0, 0.0);
  Expr one_minus_gd =
      combine(g_tilde(g2[0], g2_xpass[0], 0.0), g_tilde(g2[1], g2_xpass[1], eta0),
              -1.0 / eta0, 1.0 / eta0, 1.0);
  Expr sig_x = sb.unit(schan, 1.0 / w_id);

  // layers 5 and 6: two product blocks
  ProductRowsA pa1 = emit_product_a(sb, psi_top, gd, Mt, w_id);
  ProductRowsA pa2 = emit_product_a(sb, sig_x, one_minus_gd, Mt, w_id);
  sb.seal_layer();
  ProductRowsB pb1 = emit_product_b(sb, pa1);
  ProductRowsB pb2 = emit_product_b(sb, pa2);
  sb.seal_layer();

  Expr out = combine(product_value(sb, pb1, Mt, w_id), product_value(sb, pb2, Mt, w_id),
                     1.0, 1.0, 0.0);
  Network net = sb.finish({out});
  net.domain = Hypercube{{-M}, {M}};
  return net;
}

}  // namespace

SigmaApproxResult approximate_sigma_by_sigmoidal(double M, double epsilon, int grid_points) {
  if (!(M >= 2.0)) throw validation_error("approximate_sigma_by_sigmoidal: M must be >= 2");
  if (!(epsilon > 0.0)) throw validation_error("approximate_sigma_by_sigmoidal: epsilon must be positive");

  SigmaApproxResult best;
  best.sup_error = std::numeric_limits<double>::infinity();

  double eta0 = std::min(0.25, epsilon / 6.0);
  // shrink eta0 until the transition window is provably quiet
  while (eta0 > 1e-8 && !(eval_sigmoidal(eta0) < epsilon / 6.0 && eta0 < epsilon / 6.0))
    eta0 *= 0.5;

  for (int outer = 0; outer < 4; ++outer, eta0 *= 0.5) {
    double delta = 1.0;
    while (delta >= 1e-12) {
      const double w_id = delta * 1e-2 / std::max(16.0, M * M);
      Network net = build_sigma_approx_net(M, delta, eta0, w_id);
      double sup = 0.0;
      for (int i = 0; i < grid_points; ++i) {
        const double x = -M + 2.0 * M * double(i) / double(grid_points - 1);
        const double target = x >= 0.0 ? tri_wave(x) : softsign(x);
        sup = std::max(sup, std::fabs(eval1(net, x) - target));
      }
      if (sup < best.sup_error) {
        best.network = std::move(net);
        best.delta = delta;
        best.eta0 = eta0;
        best.sup_error = sup;
      }
      if (best.sup_error < epsilon) {
        best.converged = true;
        return best;
      }
      delta *= 0.5;
    }
  }
  return best;  // converged == false; best attempt retained
}

}  // namespace euaf::uaf
