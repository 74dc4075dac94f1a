#include "euaf/approxnd.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "euaf/detail/builder.hpp"
#include "euaf/detail/euaf_blocks.hpp"

namespace euaf::approxnd {

using detail::Expr;
using detail::StackBuilder;

namespace {
const ActivationKind kEuaf = ActivationKind::euaf();
}

double Fn1D::operator()(double t) const {
  switch (form) {
    case Form::Zero: return 0.0;
    case Form::Constant: return c0;
    case Form::Affine: return c0 + c1 * t;
    case Form::Quadratic: return c0 + t * (c1 + t * c2);
    case Form::General: return fn(t);
  }
  return 0.0;
}

void KstDecomposition::validate() const {
  if (d < 1) throw validation_error("decomposition dimension must be >= 1");
  const std::size_t terms = 2 * std::size_t(d) + 1;
  if (outer.size() != terms)
    throw validation_error("decomposition needs 2d+1 outer functions");
  if (inner.size() != terms)
    throw validation_error("decomposition inner grid must have 2d+1 rows");
  for (const auto& row : inner)
    if (row.size() != std::size_t(d))
      throw validation_error("decomposition inner grid rows must have d entries");
  for (const auto& g : outer)
    if (g.form == Fn1D::Form::General && !g.fn)
      throw validation_error("general outer function without evaluator");
  for (const auto& row : inner)
    for (const auto& h : row)
      if (h.form == Fn1D::Form::General && !h.fn)
        throw validation_error("general inner function without evaluator");
}

namespace {

// Fn1D pre-composed with an affine argument and post-scaled:
// result(t) = s * f(p + q t) + o.  Exact forms stay exact.
Fn1D transform(const Fn1D& f, double p, double q, double s, double o) {
  switch (f.form) {
    case Fn1D::Form::Zero:
      return o == 0.0 ? Fn1D::zero() : Fn1D::constant(o);
    case Fn1D::Form::Constant:
      return Fn1D::constant(s * f.c0 + o);
    case Fn1D::Form::Affine:
      return Fn1D::affine(s * (f.c0 + f.c1 * p) + o, s * f.c1 * q);
    case Fn1D::Form::Quadratic:
      return Fn1D::quadratic(s * (f.c0 + f.c1 * p + f.c2 * p * p) + o,
                             s * (f.c1 * q + 2.0 * f.c2 * p * q), s * f.c2 * q * q);
    case Fn1D::Form::General: {
      auto fn = f.fn;
      return Fn1D::general([fn, p, q, s, o](double t) { return s * fn(p + q * t) + o; });
    }
  }
  return Fn1D::zero();
}

double sup_on_unit(const Fn1D& f) {
  switch (f.form) {
    case Fn1D::Form::Zero: return 0.0;
    case Fn1D::Form::Constant: return std::fabs(f.c0);
    case Fn1D::Form::Affine: return std::max(std::fabs(f.c0), std::fabs(f.c0 + f.c1));
    case Fn1D::Form::Quadratic: {
      double m = std::max(std::fabs(f(0.0)), std::fabs(f(1.0)));
      if (f.c2 != 0.0) {
        const double v = -f.c1 / (2.0 * f.c2);
        if (v > 0.0 && v < 1.0) m = std::max(m, std::fabs(f(v)));
      }
      return m;
    }
    case Fn1D::Form::General: {
      double m = 0.0;
      for (int i = 0; i <= 100000; ++i) m = std::max(m, std::fabs(f(double(i) / 100000.0)));
      return m;
    }
  }
  return 0.0;
}

double empirical_radius(const Fn1D& g, double tol) {
  // largest dyadic delta with sup_{|z1-z2|<=delta} |g(z1)-g(z2)| < tol/2 on [0,1]
  constexpr int n = 100001;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = g(double(i) / double(n - 1));
  for (int j = 2; j <= 26; ++j) {
    const double delta = std::ldexp(1.0, -j);
    const int w = std::max(1, int(std::floor(delta * (n - 1))));
    std::deque<int> lo, hi;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      while (!lo.empty() && v[lo.back()] >= v[i]) lo.pop_back();
      lo.push_back(i);
      while (!hi.empty() && v[hi.back()] <= v[i]) hi.pop_back();
      hi.push_back(i);
      while (lo.front() < i - w) lo.pop_front();
      while (hi.front() < i - w) hi.pop_front();
      best = std::max(best, v[hi.front()] - v[lo.front()]);
      if (best >= 0.5 * tol) break;
    }
    if (best < 0.5 * tol) return delta;
  }
  throw construction_error("no usable continuity radius for an outer function", 0.0);
}

// ---- standalone 5-hidden-layer blocks on a scalar input ----

struct Block {
  Network net;  // exactly 5 hidden layers, scalar output
  std::vector<pointfit::FitResult> fits;
};

Block constant_block(double value) {
  StackBuilder sb(1);
  std::size_t r = 0;
  for (int layer = 0; layer < 5; ++layer) {
    r = sb.add(sb.expr(), kEuaf);  // zero row, stays 0
    sb.seal_layer();
  }
  Expr out = sb.unit(r, 0.0, value);
  Block b;
  b.net = sb.finish({out});
  return b;
}

Block affine_block(const Fn1D& f, double lo, double hi) {
  StackBuilder sb(1);
  Expr u(1);
  u.w[0] = 1.0 / (hi - lo);
  u.b = -lo / (hi - lo);
  std::size_t r = sb.add(u, kEuaf);
  sb.seal_layer();
  for (int layer = 1; layer < 5; ++layer) {
    r = sb.add(sb.unit(r), kEuaf);
    sb.seal_layer();
  }
  const double inter = f.c0 + f.c1 * lo;
  Expr out = sb.unit(r, f.c1 * (hi - lo), inter);
  Block b;
  b.net = sb.finish({out});
  return b;
}

Block quadratic_block(const Fn1D& f, double lo, double hi) {
  // value = A + B z + C z^2 with z = 2(t-lo)/(hi-lo) - 1 in [-1, 1]
  const double q = 0.5 * (hi - lo), p = lo + q;
  const double A = f.c0 + f.c1 * p + f.c2 * p * p;
  const double B = f.c1 * q + 2.0 * f.c2 * p * q;
  const double C = f.c2 * q * q;
  StackBuilder sb(1);
  Expr u(1);
  u.w[0] = 1.0 / (hi - lo);
  u.b = -lo / (hi - lo);
  std::size_t r = sb.add(u, kEuaf);
  sb.seal_layer();
  for (int layer = 1; layer < 3; ++layer) {
    r = sb.add(sb.unit(r), kEuaf);
    sb.seal_layer();
  }
  Expr z = sb.unit(r, 2.0, -1.0);
  detail::SquareA sa = detail::emit_square_a(sb, z);
  sb.seal_layer();
  detail::SquareB sqb = detail::emit_square_b(sb, sa);
  sb.seal_layer();
  // z^2 = 12 head + 11 lin, z = (6 - 11 lin)/5
  Expr out = sb.expr();
  out.w[sqb.head] = 12.0 * C;
  out.w[sqb.lin] = 11.0 * C - 11.0 * B / 5.0;
  out.b = A + 6.0 * B / 5.0;
  Block b;
  b.net = sb.finish({out});
  return b;
}

Block general_block(const Fn1D& f, double lo, double hi, double tol, std::uint64_t budget) {
  approx1d::Target1D t;
  auto fn = f.fn;
  t.evaluator = fn;
  t.a = lo;
  t.b = hi;
  approx1d::Approx1DReport rep = approx1d::build_interval_approx(t, tol, budget);
  Block b;
  b.net = std::move(rep.network);
  b.fits = std::move(rep.fits);
  return b;
}

Block build_block(const Fn1D& f, double lo, double hi, double tol, std::uint64_t budget) {
  switch (f.form) {
    case Fn1D::Form::Zero: return constant_block(0.0);
    case Fn1D::Form::Constant: return constant_block(f.c0);
    case Fn1D::Form::Affine: return affine_block(f, lo, hi);
    case Fn1D::Form::Quadratic: return quadratic_block(f, lo, hi);
    case Fn1D::Form::General: return general_block(f, lo, hi, tol, budget);
  }
  throw validation_error("unknown function form");
}

std::vector<double> halton_point(int index, int d, double a, double b) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<double> x(d);
  for (int j = 0; j < d; ++j) {
    const int base = primes[j % 8];
    double f = 1.0, r = 0.0;
    for (int n = index; n > 0; n /= base) {
      f /= base;
      r += f * (n % base);
    }
    x[j] = a + r * (b - a);
  }
  return x;
}

}  // namespace

std::pair<Network, AssembleReport> assemble(
    double a, double b, const KstDecomposition& kst, double epsilon, std::uint64_t budget,
    const std::function<double(std::span<const double>)>& reference, int verify_points) {
  kst.validate();
  if (!(a < b)) throw validation_error("assemble requires a < b");
  if (!(epsilon > 0.0)) throw validation_error("assemble: epsilon must be positive");
  const int d = kst.d;
  const int terms = 2 * d + 1;

  // hat_h_i = sum_j inner[i][j]((t-a)/(b-a)); M bounds them all
  double hat_sup = 0.0;
  for (int i = 0; i < terms; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += sup_on_unit(kst.inner[i][j]);
    hat_sup = std::max(hat_sup, s);
  }
  const double M = hat_sup + 1.0;

  // normalized factors: h_ij(t) = inner(L1~(t))/(4M) + 1/(2d) on [a,b],
  // g_i(z) = outer(4M z - 2M) on [0,1]
  std::vector<std::vector<Fn1D>> h(terms, std::vector<Fn1D>(d));
  std::vector<Fn1D> g(terms);
  for (int i = 0; i < terms; ++i) {
    for (int j = 0; j < d; ++j)
      h[i][j] = transform(kst.inner[i][j], -a / (b - a), 1.0 / (b - a), 1.0 / (4.0 * M),
                          1.0 / (2.0 * d));
    g[i] = transform(kst.outer[i], -2.0 * M, 4.0 * M, 1.0, 0.0);
  }

  // outer continuity radius
  const double g_tol = epsilon / double(4 * d + 2);
  double delta = 0.25;
  for (int i = 0; i < terms; ++i)
    if (g[i].form == Fn1D::Form::General)
      delta = std::min(delta, empirical_radius(g[i], g_tol));

  AssembleReport report;
  report.M = M;
  report.delta = delta;

  // sub-blocks
  std::vector<std::vector<Block>> psi(terms);
  std::vector<Block> phi(terms);
  for (int i = 0; i < terms; ++i) {
    psi[i].resize(d);
    const bool dead = kst.outer[i].is_zero();
    for (int j = 0; j < d; ++j) {
      psi[i][j] = dead ? constant_block(0.0)
                       : build_block(h[i][j], a, b, delta / double(d), budget);
      for (auto& f : psi[i][j].fits) report.fits.push_back(f);
    }
    phi[i] = dead ? constant_block(0.0) : build_block(g[i], 0.0, 1.0, g_tol, budget);
    for (auto& f : phi[i].fits) report.fits.push_back(f);
  }

  // junction sanity: each non-dead psi_i must land in [0,1] so the wave
  // activation passes it through unchanged
  for (int i = 0; i < terms; ++i) {
    if (kst.outer[i].is_zero()) continue;
    for (int gidx = 0; gidx < 2000; ++gidx) {
      const auto pt = halton_point(gidx + 1, d, a, b);
      double v = 0.0;
      for (int j = 0; j < d; ++j) v += eval1(psi[i][j].net, pt[j]);
      if (v < 0.0 || v > 1.0) {
        std::ostringstream os;
        os << "assembled inner sum " << i << " leaves [0,1] (value " << v << ")";
        throw construction_error(os.str(), std::fabs(v - 0.5) - 0.5);
      }
    }
  }

  // fixed architecture
  const std::size_t wide = std::size_t(36) * d * terms;   // layers 1..5
  const std::size_t mid = std::size_t(terms);             // junction layer 6
  const std::size_t upper = std::size_t(36) * terms;      // layers 7..11
  Network net;
  net.input_dim = d;
  net.layers.resize(12);
  net.hidden_activations.resize(11);
  const std::size_t dims[13] = {std::size_t(d), wide, wide, wide, wide, wide, mid,
                                upper, upper, upper, upper, upper, 1};
  for (int li = 0; li < 12; ++li) {
    net.layers[li] = AffineLayer(dims[li + 1], dims[li]);
    if (li < 11)
      net.hidden_activations[li].assign(dims[li + 1], kEuaf);
  }

  auto blit_hidden = [&](const Network& block, int big_layer, std::size_t row_base,
                         std::size_t in_col, int block_layer) {
    const AffineLayer& B = block.layers[block_layer];
    AffineLayer& L = net.layers[big_layer];
    for (std::size_t r = 0; r < B.out_dim; ++r) {
      for (std::size_t c = 0; c < B.in_dim; ++c) {
        const std::size_t col = block_layer == 0 ? in_col : row_base + c;
        L.w(row_base + r, col) = B.w(r, c);
      }
      L.bias[row_base + r] = B.bias[r];
      net.hidden_activations[big_layer][row_base + r] =
          block.hidden_activations[block_layer][r];
    }
  };

  for (int i = 0; i < terms; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::size_t base = (std::size_t(i) * d + j) * 36;
      const Network& blk = psi[i][j].net;
      for (int bl = 0; bl < 5; ++bl) blit_hidden(blk, bl, base, std::size_t(j), bl);
      // block output joins junction row i
      const AffineLayer& out = blk.layers[5];
      for (std::size_t c = 0; c < out.in_dim; ++c)
        net.layers[5].w(std::size_t(i), base + c) = out.w(0, c);
      net.layers[5].bias[std::size_t(i)] += out.bias[0];
    }
    const std::size_t base = std::size_t(i) * 36;
    const Network& blk = phi[i].net;
    for (int bl = 0; bl < 5; ++bl) blit_hidden(blk, 6 + bl, base, std::size_t(i), bl);
    const AffineLayer& out = blk.layers[5];
    for (std::size_t c = 0; c < out.in_dim; ++c)
      net.layers[11].w(0, base + c) += out.w(0, c);
    net.layers[11].bias[0] += out.bias[0];
  }
  net.domain = Hypercube{std::vector<double>(d, a), std::vector<double>(d, b)};
  net.validate();

  report.nonzero_params = count_params(net).nonzero;

  if (reference) {
    double sup = 0.0;
    for (int gidx = 0; gidx < verify_points; ++gidx) {
      const auto pt = halton_point(gidx + 1, d, a, b);
      sup = std::max(sup, std::fabs(eval(net, pt)[0] - reference(pt)));
    }
    report.grid_sup_error = sup;
  }
  return {std::move(net), std::move(report)};
}

double kst_sanity(const KstDecomposition& kst,
                  const std::function<double(std::span<const double>)>& f, double a,
                  double b, int grid_points) {
  kst.validate();
  const int d = kst.d;
  const int terms = 2 * d + 1;
  double worst = 0.0;
  for (int gidx = 1; gidx <= grid_points; ++gidx) {
    const auto y = halton_point(gidx, d, 0.0, 1.0);
    std::vector<double> x(d);
    for (int j = 0; j < d; ++j) x[j] = a + (b - a) * y[j];
    double s = 0.0;
    for (int i = 0; i < terms; ++i) {
      double z = 0.0;
      for (int j = 0; j < d; ++j) z += kst.inner[i][j](y[j]);
      s += kst.outer[i](z);
    }
    worst = std::max(worst, std::fabs(f(x) - s));
  }
  return worst;
}

KstDecomposition additive_decomposition(int d, const std::vector<double>& coeffs, double a,
                                        double b) {
  if (int(coeffs.size()) != d)
    throw validation_error("additive decomposition needs d coefficients");
  KstDecomposition kst;
  kst.d = d;
  const int terms = 2 * d + 1;
  kst.inner.assign(terms, std::vector<Fn1D>(d, Fn1D::zero()));
  kst.outer.assign(terms, Fn1D::zero());
  for (int j = 0; j < d; ++j)
    kst.inner[0][j] = Fn1D::affine(coeffs[j] * a, coeffs[j] * (b - a));
  kst.outer[0] = Fn1D::affine(0.0, 1.0);
  return kst;
}

KstDecomposition product2_decomposition(double a, double b) {
  KstDecomposition kst;
  kst.d = 2;
  kst.inner.assign(5, std::vector<Fn1D>(2, Fn1D::zero()));
  kst.outer.assign(5, Fn1D::zero());
  const Fn1D coord = Fn1D::affine(a, b - a);  // L1(y)
  kst.inner[0][0] = coord;
  kst.inner[0][1] = coord;
  kst.outer[0] = Fn1D::quadratic(0.0, 0.0, 0.5);
  kst.inner[1][0] = coord;
  kst.outer[1] = Fn1D::quadratic(0.0, 0.0, -0.5);
  kst.inner[2][1] = coord;
  kst.outer[2] = Fn1D::quadratic(0.0, 0.0, -0.5);
  return kst;
}

KstDecomposition trivial1d(const Fn1D& f, double a, double b) {
  KstDecomposition kst;
  kst.d = 1;
  kst.inner.assign(3, std::vector<Fn1D>(1, Fn1D::zero()));
  kst.outer.assign(3, Fn1D::zero());
  kst.inner[0][0] = Fn1D::affine(a, b - a);  // hat_h_0(x) = x
  kst.outer[0] = f;
  return kst;
}

}  // namespace euaf::approxnd
