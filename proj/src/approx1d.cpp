#include "euaf/approx1d.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "euaf/detail/builder.hpp"
#include "euaf/detail/euaf_blocks.hpp"

namespace euaf::approx1d {

using detail::Expr;
using detail::StackBuilder;

namespace {

constexpr int kModulusGrid = 100'001;
constexpr int kVerifyGrid = 10'000;
constexpr double kPi = 3.141592653589793;
const ActivationKind kEuaf = ActivationKind::euaf();

std::vector<double> sample_values(const Target1D& t, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double x = t.a + (t.b - t.a) * double(i) / double(n - 1);
    v[i] = t.evaluator(x);
    if (!std::isfinite(v[i]))
      throw std::domain_error("target evaluator returned a non-finite value");
  }
  return v;
}

// sup over |x-y| <= delta of |f(x)-f(y)| from a uniform sample, via
// sliding-window min/max.
double empirical_modulus(const std::vector<double>& v, double len, double delta) {
  const int n = static_cast<int>(v.size());
  const int w = std::max(1, static_cast<int>(std::floor(delta / len * (n - 1))));
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
  }
  return best;
}

// f extended by f(lo) below lo and clamped at hi; domain errors surface on
// first use.
std::function<double(double)> clamped(const std::function<double(double)>& f, double lo,
                                      double hi) {
  return [f, lo, hi](double x) { return f(std::clamp(x, lo, hi)); };
}

}  // namespace

int choose_K(const Target1D& target, double epsilon) {
  if (!(epsilon > 0.0)) throw validation_error("choose_K: epsilon must be positive");
  if (target.user_K) {
    if (*target.user_K < 10) throw validation_error("user K must be >= 10");
    return *target.user_K;
  }
  const auto v = sample_values(target, kModulusGrid);
  const double len = target.b - target.a;
  const double want = epsilon / 4.0;
  if (empirical_modulus(v, len, 1.0 / 10.0) < want) return 10;
  int lo = 10, hi = 1 << 20;
  while (empirical_modulus(v, len, 1.0 / hi) >= want) {
    lo = hi;
    hi *= 2;
    if (hi > (1 << 26))
      throw construction_error("choose_K: no feasible K below 2^26", 0.0);
  }
  while (lo + 1 < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (empirical_modulus(v, len, 1.0 / mid) < want)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

// Rows of one half-approximator branch through the first three layers.
// Input argument is y = x + shift.
struct HalfRows {
  std::size_t wave, pass;  // layer 1: sigma(2K y), sigma(y)
  std::size_t mid;         // layer 2
  std::size_t top;         // layer 3
};

void half_layer1(StackBuilder& sb, int K, double shift, HalfRows* rows) {
  Expr wave(1), pass(1);
  wave.w[0] = 2.0 * K;
  wave.b = 2.0 * K * shift;
  pass.w[0] = 1.0;
  pass.b = shift;
  rows->wave = sb.add(wave, kEuaf);
  rows->pass = sb.add(pass, kEuaf);
}

void half_layer2(StackBuilder& sb, int K, HalfRows* rows) {
  Expr mid = sb.expr();
  mid.w[rows->wave] = 0.5;
  mid.w[rows->pass] = -double(K);
  mid.b = -kPi;
  rows->mid = sb.add(mid, kEuaf);
}

void half_layer3(StackBuilder& sb, double w0, long long m0, HalfRows* rows) {
  Expr top = sb.expr();
  top.w[rows->mid] = w0;
  top.b = w0 + 2.0 * double(m0);
  rows->top = sb.add(top, kEuaf);
}

Expr half_value(const StackBuilder& sb, const HalfRows& rows, double M) {
  Expr v = sb.unit(rows.top, 2.0 * M);
  v.b = -M;
  return v;
}

pointfit::FitResult fit_half(const std::function<double(double)>& f, int K, double M,
                             double epsilon, std::uint64_t budget) {
  pointfit::FitTargets targets;
  targets.values.resize(K);
  for (int k = 1; k <= K; ++k) {
    const double xk = double(2 * k - 1) / double(2 * K);
    targets.values[k - 1] = (f(xk) + M) / (2.0 * M);
  }
  pointfit::FitResult r = pointfit::fit(targets, epsilon / (4.0 * M), budget);
  if (!r.satisfied) {
    std::ostringstream os;
    os << "point fit exhausted its budget of " << budget << " evaluations at K=" << K
       << " tol=" << epsilon / (4.0 * M) << " (best " << r.max_error << ")";
    throw construction_error(os.str(), r.max_error);
  }
  return r;
}

double sup_abs(const std::function<double(double)>& f, double lo, double hi, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(n - 1);
    m = std::max(m, std::fabs(f(x)));
  }
  return m;
}

}  // namespace

Approx1DReport build_half_approx(const Target1D& target, int K, double epsilon,
                                 std::uint64_t budget, std::optional<double> M_override) {
  if (target.a != 0.0 || target.b != 1.0)
    throw validation_error("build_half_approx expects the unit interval");
  if (K < 1) throw validation_error("build_half_approx: K must be >= 1");
  if (!(epsilon > 0.0)) throw validation_error("epsilon must be positive");

  const double M =
      M_override ? *M_override : sup_abs(target.evaluator, 0.0, 1.0, kModulusGrid) + 1.0;
  pointfit::FitResult fit = fit_half(target.evaluator, K, M, epsilon, budget);
  auto [w0, m0] = pointfit::shift_nonneg(fit);

  StackBuilder sb(1);
  HalfRows rows;
  half_layer1(sb, K, 0.0, &rows);
  sb.seal_layer();
  half_layer2(sb, K, &rows);
  sb.seal_layer();
  half_layer3(sb, w0, m0, &rows);
  sb.seal_layer();
  Network net = sb.finish({half_value(sb, rows, M)});
  net.domain = Hypercube{{0.0}, {1.0}};

  Approx1DReport report;
  report.network = std::move(net);
  report.K = K;
  report.M = M;
  report.w0 = w0;
  report.m0 = m0;
  report.fits = {fit};
  report.m0s = {m0};
  report.guarantee_region = "union of [2k/2K, (2k+1)/2K], k = 0.." + std::to_string(K - 1);

  // verify on the guaranteed half-intervals only
  double sup = 0.0;
  const int per = std::max(2, kVerifyGrid / K);
  for (int k = 0; k < K; ++k) {
    const double lo = double(2 * k) / double(2 * K);
    const double hi = double(2 * k + 1) / double(2 * K);
    for (int i = 0; i < per; ++i) {
      const double x = lo + (hi - lo) * double(i) / double(per - 1);
      sup = std::max(sup, std::fabs(eval1(report.network, x) - target.evaluator(x)));
    }
  }
  report.grid_sup_error = sup;
  return report;
}

Approx1DReport build_region_approx(const Target1D& target, double epsilon,
                                   std::uint64_t budget) {
  if (target.a != 0.0 || target.b != 1.0)
    throw validation_error("build_region_approx expects the unit interval");
  if (!(epsilon > 0.0)) throw validation_error("epsilon must be positive");

  // extend by f(0) below 0 and clamp above 1
  auto f = target.evaluator;
  auto ext = clamped(f, 0.0, 1.0);

  Target1D ext_target;
  ext_target.evaluator = ext;
  ext_target.a = -1.0;
  ext_target.b = 1.0;
  ext_target.user_K = target.user_K;
  const double eps_i = epsilon / 4.0;
  const int K = choose_K(ext_target, eps_i);

  const double M = sup_abs(ext, -1.0, 1.0, kModulusGrid) + 1.0;

  // four shifted half approximators at epsilon/4 with the shared bound M
  std::vector<pointfit::FitResult> fits(4);
  std::vector<double> w0s(4);
  std::vector<long long> m0s(4);
  const std::uint64_t each = std::max<std::uint64_t>(1, budget / 4);
  for (int i = 1; i <= 4; ++i) {
    const double shift = double(i) / double(4 * K);
    auto fi = [ext, shift](double x) { return ext(x - shift); };
    fits[i - 1] = fit_half(fi, K, M, eps_i, each);
    auto [w0, m0] = pointfit::shift_nonneg(fits[i - 1]);
    w0s[i - 1] = w0;
    m0s[i - 1] = m0;
  }

  // assemble: per component, a half branch at y = x + i/4K and a bump
  // branch psi(2Kx + i/2), multiplied by the exact product block.
  StackBuilder sb(1);
  const double P = 2.0 * K + 1.0;
  struct CompRows {
    HalfRows half;
    std::size_t bump_scaled, bump_plain;  // layer 1
    std::size_t bump;                     // layer 2
    std::size_t bump_pass;                // layer 3
    detail::ProductA prod_a;              // layer 4
    detail::ProductB prod_b;              // layer 5
  };
  CompRows comp[4];

  for (int i = 1; i <= 4; ++i) {
    CompRows& c = comp[i - 1];
    half_layer1(sb, K, double(i) / double(4 * K), &c.half);
    Expr scaled(1), plain(1);
    scaled.w[0] = 2.0 * K / P;
    scaled.b = (0.5 * i + 1.0) / P;
    plain.w[0] = 2.0 * K;
    plain.b = 0.5 * i + 1.0;
    c.bump_scaled = sb.add(scaled, kEuaf);
    c.bump_plain = sb.add(plain, kEuaf);
  }
  sb.seal_layer();  // layer 1: 4 x 4 = 16 rows

  for (int i = 0; i < 4; ++i) {
    CompRows& c = comp[i];
    half_layer2(sb, K, &c.half);
    Expr inner = sb.expr();
    inner.w[c.bump_scaled] = P;
    inner.w[c.bump_plain] = -1.0;
    c.bump = sb.add(inner, kEuaf);
  }
  sb.seal_layer();  // layer 2: 8 rows

  for (int i = 0; i < 4; ++i) {
    CompRows& c = comp[i];
    half_layer3(sb, w0s[i], m0s[i], &c.half);
    c.bump_pass = sb.add(sb.unit(c.bump), kEuaf);  // bump value is in [0,1]
  }
  sb.seal_layer();  // layer 3: 8 rows

  for (int i = 0; i < 4; ++i) {
    CompRows& c = comp[i];
    Expr u = half_value(sb, c.half, M);
    Expr v = sb.unit(c.bump_pass);
    c.prod_a = detail::emit_product_a(sb, u, v, M);
  }
  sb.seal_layer();  // layer 4: 36 rows

  for (int i = 0; i < 4; ++i) comp[i].prod_b = detail::emit_product_b(sb, comp[i].prod_a);
  sb.seal_layer();  // layer 5: 24 rows

  Expr out = sb.expr();
  for (int i = 0; i < 4; ++i) {
    Expr v = detail::product_value(sb, comp[i].prod_b, M);
    for (std::size_t j = 0; j < out.w.size(); ++j) out.w[j] += v.w[j];
    out.b += v.b;
  }
  Network net = sb.finish({out});
  net.domain = Hypercube{{0.0}, {0.9}};

  Approx1DReport report;
  report.network = std::move(net);
  report.K = K;
  report.M = M;
  report.w0 = w0s[0];
  report.m0 = m0s[0];
  report.fits = std::move(fits);
  report.m0s = std::move(m0s);
  report.guarantee_region = "[0, 9/10]";
  double sup = 0.0;
  for (int i = 0; i < kVerifyGrid; ++i) {
    const double x = 0.9 * double(i) / double(kVerifyGrid - 1);
    sup = std::max(sup, std::fabs(eval1(report.network, x) - f(x)));
  }
  report.grid_sup_error = sup;
  return report;
}

Approx1DReport build_interval_approx(const Target1D& target, double epsilon,
                                     std::uint64_t budget) {
  if (!(target.a < target.b)) throw validation_error("interval requires a < b");
  const double a = target.a, b = target.b;
  auto f = target.evaluator;
  // L(x) = a + 10(b-a)/9 * x maps [0, 9/10] onto [a, b]
  const double slope = 10.0 * (b - a) / 9.0;
  Target1D unit;
  unit.evaluator = [f, a, b, slope](double x) {
    return f(std::clamp(a + slope * x, a, b));
  };
  unit.a = 0.0;
  unit.b = 1.0;
  unit.user_K = target.user_K;

  Approx1DReport report = build_region_approx(unit, epsilon, budget);

  // fuse x = 9(y-a)/(10(b-a)) into the first affine layer
  const double inv_slope = 1.0 / slope;
  AffineLayer& L0 = report.network.layers.front();
  for (std::size_t r = 0; r < L0.out_dim; ++r) {
    const double w = L0.w(r, 0);
    L0.w(r, 0) = w * inv_slope;
    L0.bias[r] -= w * inv_slope * a;
  }
  report.network.domain = Hypercube{{a}, {b}};
  report.guarantee_region = "[" + std::to_string(a) + ", " + std::to_string(b) + "]";

  double sup = 0.0;
  for (int i = 0; i < kVerifyGrid; ++i) {
    const double y = a + (b - a) * double(i) / double(kVerifyGrid - 1);
    sup = std::max(sup, std::fabs(eval1(report.network, y) - f(y)));
  }
  report.grid_sup_error = sup;
  return report;
}

}  // namespace euaf::approx1d
