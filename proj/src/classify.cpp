#include "euaf/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "euaf/detail/builder.hpp"

namespace euaf::classify {

using detail::Expr;
using detail::StackBuilder;

namespace {

constexpr double kMinGap = 1e-9;
const ActivationKind kEuaf = ActivationKind::euaf();

double interval_dist(double x, const std::array<double, 2>& iv) {
  if (x < iv[0]) return iv[0] - x;
  if (x > iv[1]) return x - iv[1];
  return 0.0;
}

double region_dist(double x, const std::vector<std::array<double, 2>>& region) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& iv : region) d = std::min(d, interval_dist(x, iv));
  return d;
}

}  // namespace

void LabeledRegions::validate() const {
  if (regions.empty()) throw validation_error("need at least one region");
  if (regions.size() != labels.size())
    throw validation_error("one label per region required");
  for (const auto& r : labels)
    if (r.den == 0) throw validation_error("label denominators must be nonzero");
  std::vector<std::pair<std::array<double, 2>, std::size_t>> ivs;
  for (std::size_t j = 0; j < regions.size(); ++j) {
    if (regions[j].empty()) throw validation_error("empty region");
    for (const auto& iv : regions[j]) {
      if (!(iv[0] <= iv[1])) throw validation_error("interval endpoints out of order");
      if (iv[0] < box_lo || iv[1] > box_hi)
        throw validation_error("region leaves the bounding box");
      ivs.push_back({iv, j});
    }
  }
  std::sort(ivs.begin(), ivs.end(),
            [](const auto& a, const auto& b) { return a.first[0] < b.first[0]; });
  for (std::size_t i = 0; i + 1 < ivs.size(); ++i) {
    const double gap = ivs[i + 1].first[0] - ivs[i].first[1];
    if (ivs[i].second != ivs[i + 1].second && gap <= kMinGap) {
      std::ostringstream os;
      os << "regions are not separated (gap " << gap << " at x=" << ivs[i].first[1] << ")";
      throw validation_error(os.str());
    }
    if (ivs[i].second == ivs[i + 1].second && gap < 0.0)
      throw validation_error("overlapping intervals inside a region");
  }
}

void LabeledPointClouds::validate() const {
  if (clouds.empty()) throw validation_error("need at least one cloud");
  if (clouds.size() != labels.size()) throw validation_error("one label per cloud required");
  for (const auto& r : labels)
    if (r.den == 0) throw validation_error("label denominators must be nonzero");
  for (std::size_t i = 0; i < clouds.size(); ++i)
    for (std::size_t j = i + 1; j < clouds.size(); ++j) {
      double d2min = std::numeric_limits<double>::infinity();
      for (const auto& p : clouds[i])
        for (const auto& q : clouds[j]) {
          double d2 = 0.0;
          for (std::size_t k = 0; k < p.size(); ++k) d2 += (p[k] - q[k]) * (p[k] - q[k]);
          d2min = std::min(d2min, d2);
        }
      if (!(std::sqrt(d2min) > kMinGap))
        throw validation_error("point clouds are not separated");
    }
}

std::function<double(double)> continuous_extension(const LabeledRegions& regions) {
  regions.validate();
  auto regs = regions.regions;
  std::vector<double> vals(regions.labels.size());
  for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = regions.labels[j].value();
  return [regs, vals](double x) {
    double g = 0.0;
    for (std::size_t j = 0; j < regs.size(); ++j) {
      const double dj = region_dist(x, regs[j]);
      double dother = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < regs.size(); ++k)
        if (k != j) dother = std::min(dother, region_dist(x, regs[k]));
      if (regs.size() == 1) dother = 1.0;  // single region: g_j == 1 everywhere it matters
      g += vals[j] * (dother / (dj + dother));
    }
    return g;
  };
}

std::function<double(const std::vector<double>&)> continuous_extension_nd(
    const LabeledPointClouds& clouds) {
  clouds.validate();
  auto cl = clouds.clouds;
  std::vector<double> vals(clouds.labels.size());
  for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = clouds.labels[j].value();
  auto dist = [](const std::vector<double>& x,
                 const std::vector<std::vector<double>>& cloud) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : cloud) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - p[k]) * (x[k] - p[k]);
      best = std::min(best, d2);
    }
    return std::sqrt(best);
  };
  return [cl, vals, dist](const std::vector<double>& x) {
    double g = 0.0;
    for (std::size_t j = 0; j < cl.size(); ++j) {
      const double dj = dist(x, cl[j]);
      double dother = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < cl.size(); ++k)
        if (k != j) dother = std::min(dother, dist(x, cl[k]));
      if (cl.size() == 1) dother = 1.0;
      g += vals[j] * (dother / (dj + dother));
    }
    return g;
  };
}

std::pair<long long, long long> choose_integers(const std::vector<Rational>& labels,
                                                double lo, double hi) {
  if (labels.empty()) throw validation_error("choose_integers: no labels");
  long long n1 = 1;
  for (const auto& r : labels) {
    const long long den = std::llabs(r.den);
    n1 = std::lcm(n1, den);
  }
  long long min_n1r = std::numeric_limits<long long>::max();
  for (const auto& r : labels) {
    const long long v = (n1 / std::llabs(r.den)) * r.num * (r.den < 0 ? -1 : 1);
    min_n1r = std::min(min_n1r, v);
  }
  long long n2 = 1;
  n2 = std::max(n2, static_cast<long long>(std::ceil(-double(n1) * lo)) + 1);
  n2 = std::max(n2, 1 - min_n1r);
  // both conditions re-checked before returning
  for (const auto& r : labels) {
    const long long v = (n1 / std::llabs(r.den)) * r.num * (r.den < 0 ? -1 : 1) + n2;
    if (v < 1) throw std::logic_error("choose_integers: n1*r+n2 not positive");
  }
  if (double(n1) * lo + double(n2) < 0.0)
    throw std::logic_error("choose_integers: n1*g+n2 can be negative");
  (void)hi;
  return {n1, n2};
}

ClassifyReport build_classifier(const LabeledRegions& regions, std::uint64_t budget) {
  (void)budget;  // the piecewise-linear pre-snap stage is exact; no search runs
  regions.validate();
  const double a = regions.box_lo, b = regions.box_hi;
  const std::size_t J = regions.regions.size();

  // conservative range of g = sum r_j g_j with each g_j in [0,1]
  double g_lo = 0.0, g_hi = 0.0;
  for (const auto& r : regions.labels) {
    g_lo += std::min(0.0, r.value());
    g_hi += std::max(0.0, r.value());
  }
  auto [n1, n2] = choose_integers(regions.labels, g_lo, g_hi);

  // odd integer plateau targets c_j = 2(n1 r_j + n2) + 1
  std::vector<double> c(J);
  for (std::size_t j = 0; j < J; ++j) {
    const auto& r = regions.labels[j];
    const long long n1r = (n1 / std::llabs(r.den)) * r.num * (r.den < 0 ? -1 : 1);
    c[j] = double(2 * (n1r + n2) + 1);
  }

  // piecewise-linear pre-snap target: constant c_j on each interval of
  // region j, linear across gaps, constant outside
  struct Seg {
    double lo, hi, value;
  };
  std::vector<Seg> segs;
  for (std::size_t j = 0; j < J; ++j)
    for (const auto& iv : regions.regions[j]) segs.push_back({iv[0], iv[1], c[j]});
  std::sort(segs.begin(), segs.end(), [](const Seg& s, const Seg& t) { return s.lo < t.lo; });

  // hinge pairs per gap: F(x) = c_first + sum_g s_g (ReLU(x-u) - ReLU(x-e)),
  // realized via |t| = R*sigma(t/R + 2) on |t| <= R
  const double R = b - a;
  StackBuilder sb(1);
  struct Hinge {
    std::size_t row_u, row_e;
    double slope, u, e;
  };
  std::vector<Hinge> hinges;
  for (std::size_t s = 0; s + 1 < segs.size(); ++s) {
    const double u = segs[s].hi, e = segs[s + 1].lo;
    const double dv = segs[s + 1].value - segs[s].value;
    if (dv == 0.0) continue;
    Hinge h;
    h.slope = dv / (e - u);
    h.u = u;
    h.e = e;
    Expr eu(1), ee(1);
    eu.w[0] = 1.0 / R;
    eu.b = -u / R + 2.0;
    ee.w[0] = 1.0 / R;
    ee.b = -e / R + 2.0;
    h.row_u = sb.add(eu, kEuaf);
    h.row_e = sb.add(ee, kEuaf);
    hinges.push_back(h);
  }
  if (hinges.empty()) sb.add(sb.expr(), kEuaf);  // keep the layer nonempty
  sb.seal_layer();

  // F(x) over layer-1 rows; the linear-in-x parts of each hinge pair cancel
  Expr F = sb.expr();
  F.b = segs.front().value;
  for (const auto& h : hinges) {
    F.b += 0.5 * h.slope * (h.e - h.u);
    F.w[h.row_u] += 0.5 * h.slope * R;
    F.w[h.row_e] -= 0.5 * h.slope * R;
  }

  const double c_max = *std::max_element(c.begin(), c.end());
  const double M2 = c_max;  // F/M2 lies in (0, 1]
  Expr chain = F;
  for (auto& v : chain.w) v /= M2;
  chain.b /= M2;
  std::size_t r_chain = sb.add(chain, kEuaf);
  sb.seal_layer();  // layer 2
  for (int layer = 3; layer <= 11; ++layer) {
    r_chain = sb.add(sb.unit(r_chain), kEuaf);
    sb.seal_layer();
  }

  // snap layer: phi2(y) = Msnap*sigma(y/Msnap) + 1/2 - sigma(y + 3/2)
  const double g_abs = std::max(std::fabs(double(n1) * g_lo + double(n2)),
                                std::fabs(double(n1) * g_hi + double(n2)));
  const double Msnap = 2.0 * g_abs + 1.5;
  std::size_t r_s0 = sb.add(sb.unit(r_chain, M2 / Msnap), kEuaf);
  std::size_t r_s1 = sb.add(sb.unit(r_chain, M2, 1.5), kEuaf);
  sb.seal_layer();  // layer 12

  Expr out = sb.expr();
  out.w[r_s0] = Msnap / (2.0 * double(n1));
  out.w[r_s1] = -1.0 / (2.0 * double(n1));
  out.b = (0.5 - 2.0 * double(n2) - 1.0) / (2.0 * double(n1));
  Network net = sb.finish({out});
  net.domain = Hypercube{{a}, {b}};

  // pad to the fixed architecture: layers 1-5 and 7-11 are 36d(2d+1) wide,
  // the junction layer 6 has 2d+1 rows, the snap layer 2
  const std::size_t wide = 36 * 1 * 3;
  const std::size_t dims[13] = {1, wide, wide, wide, wide, wide, 3,
                                wide, wide, wide, wide, wide, 2};
  Network padded;
  padded.input_dim = 1;
  padded.layers.resize(13);
  padded.hidden_activations.resize(12);
  std::size_t prev = 1;
  for (int li = 0; li < 12; ++li) {
    padded.layers[li] = AffineLayer(dims[li + 1] > 0 ? dims[li + 1] : 1, prev);
    padded.hidden_activations[li].assign(padded.layers[li].out_dim, kEuaf);
    const AffineLayer& src = net.layers[li];
    for (std::size_t r = 0; r < src.out_dim; ++r) {
      for (std::size_t cidx = 0; cidx < src.in_dim; ++cidx)
        padded.layers[li].w(r, cidx) = src.w(r, cidx);
      padded.layers[li].bias[r] = src.bias[r];
      padded.hidden_activations[li][r] = net.hidden_activations[li][r];
    }
    prev = padded.layers[li].out_dim;
  }
  padded.layers[12] = AffineLayer(1, prev);
  for (std::size_t cidx = 0; cidx < net.layers[12].in_dim; ++cidx)
    padded.layers[12].w(0, cidx) = net.layers[12].w(0, cidx);
  padded.layers[12].bias[0] = net.layers[12].bias[0];
  padded.domain = net.domain;
  padded.validate();

  ClassifyReport report;
  report.network = std::move(padded);
  report.n1 = n1;
  report.n2 = n2;

  // verify 1000 samples per region
  auto pre_snap = [&](double x) {
    double v = segs.front().value;
    for (const auto& h : hinges) {
      v += h.slope * (std::max(0.0, x - h.u) - std::max(0.0, x - h.e));
    }
    return v;
  };
  for (std::size_t j = 0; j < J; ++j) {
    const auto& region = regions.regions[j];
    const double label = regions.labels[j].value();
    const int per = std::max(2, int(1000 / region.size()));
    for (const auto& iv : region) {
      for (int i = 0; i < per; ++i) {
        const double x = iv[0] + (iv[1] - iv[0]) * double(i) / double(per - 1);
        const double y = eval1(report.network, x);
        report.max_deviation_on_samples =
            std::max(report.max_deviation_on_samples, std::fabs(y - label));
        report.phi1_max_error =
            std::max(report.phi1_max_error, std::fabs(pre_snap(x) - c[j]));
        ++report.verified_points;
      }
    }
  }
  return report;
}

}  // namespace euaf::classify
