#include "euaf/pointfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "euaf/network.hpp"
#include "euaf/threading.hpp"

namespace euaf::pointfit {

namespace {

// must match euaf::tri_wave bit for bit: results are re-verified externally
inline double tri(double x) {
  return std::fabs(x - 2.0 * std::floor((x + 1.0) * 0.5));
}

double residual(const std::vector<double>& a, const std::vector<double>& xi, double w) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::max(m, std::fabs(tri(w * a[k]) - xi[k]));
  return m;
}

// Residual with early exit once the running max reaches `cut`; returns a
// value >= cut in that case.
double residual_cut(const std::vector<double>& a, const std::vector<double>& xi, double w,
                    double cut) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double v = std::fabs(tri(w * a[k]) - xi[k]);
    if (v > m) {
      m = v;
      if (m >= cut) return m;
    }
  }
  return m;
}

struct Candidate {
  std::uint64_t index = 0;
  double w = 0.0;
  double err = std::numeric_limits<double>::infinity();
};

// Iterated local grid zoom around w0 minimizing the residual.
Candidate polish(const std::vector<double>& a, const std::vector<double>& xi, double w0,
                 double half_width, std::uint64_t* evals) {
  double center = w0, radius = half_width;
  double best_w = w0, best_err = residual(a, xi, w0);
  ++*evals;
  for (int iter = 0; iter < 18 && radius > 1e-14 * (std::fabs(center) + 1.0); ++iter) {
    for (int j = -16; j <= 16; ++j) {
      const double w = center + radius * double(j) / 16.0;
      if (w < 0.0) continue;
      const double e = residual(a, xi, w);
      ++*evals;
      if (e < best_err) {
        best_err = e;
        best_w = w;
      }
    }
    center = best_w;
    radius /= 8.0;
  }
  return {0, best_w, best_err};
}

}  // namespace

void FitTargets::validate() const {
  if (values.empty()) throw validation_error("fit targets must be nonempty");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw validation_error("fit target values must lie in [0,1]");
  if (!offsets.empty()) {
    if (offsets.size() != values.size())
      throw validation_error("offsets must match the target count");
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (alpha + offsets[i] == 0.0)
        throw validation_error("alpha + offset must be nonzero");
      for (std::size_t j = i + 1; j < offsets.size(); ++j)
        if (offsets[i] == offsets[j])
          throw validation_error("offsets must be pairwise distinct");
    }
  }
}

std::vector<double> FitTargets::frequencies() const {
  std::vector<double> a(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double r = offsets.empty() ? double(k + 1) : offsets[k];
    a[k] = 1.0 / (alpha + r);
  }
  return a;
}

FitResult fit(const FitTargets& targets, double epsilon, std::uint64_t budget) {
  targets.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw validation_error("fit epsilon must lie in (0,1)");
  if (budget < 1) throw validation_error("fit budget must be >= 1");

  const std::vector<double> a = targets.frequencies();
  const std::vector<double>& xi = targets.values;
  double a_max = 0.0;
  for (double v : a) a_max = std::max(a_max, std::fabs(v));
  const double P = 2.0 / a_max;         // smallest coordinate period in w
  const double pitch_floor = P / 64.0;  // 64x oversampling of that period
  const double B0 = 1024.0 * P;

  FitResult best;
  best.max_error = std::numeric_limits<double>::infinity();
  std::uint64_t used = 0;
  double bound_reached = 0.0;

  constexpr std::uint64_t kChunk = 1 << 20;

  auto finalize = [&](double w, bool satisfied) {
    FitResult r;
    r.w = w;
    r.per_index_error.resize(a.size());
    r.max_error = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      r.per_index_error[k] = std::fabs(tri(w * a[k]) - xi[k]);
      r.max_error = std::max(r.max_error, r.per_index_error[k]);
    }
    r.evaluations = used;
    r.search_bound_reached = bound_reached;
    r.satisfied = satisfied && r.max_error < epsilon;
    return r;
  };

  // Round plan: rounds 0..4 sweep [0, B0] while the pitch halves from P/4
  // down to the P/64 floor; later rounds scan disjoint doubling windows
  // (B0 2^{r-5}, B0 2^{r-4}] at the floor pitch.
  for (int round = 0; used < budget; ++round) {
    double pitch, w_base;
    std::uint64_t n_cand, j_offset;
    if (round <= 4) {
      pitch = P / 4.0 / double(1u << round);
      w_base = 0.0;
      j_offset = 0;  // first candidate sits at w = 0
      n_cand = static_cast<std::uint64_t>(B0 / pitch) + 1;
    } else {
      pitch = pitch_floor;
      w_base = B0 * std::ldexp(1.0, round - 5);
      j_offset = 1;  // window is half-open on the left
      n_cand = static_cast<std::uint64_t>((w_base * 2.0 - w_base) / pitch);
    }
    const std::uint64_t n_target = std::min<std::uint64_t>(n_cand, budget - used);
    const std::uint64_t n_chunks = (n_target + kChunk - 1) / kChunk;

    struct ChunkOut {
      Candidate hit;                 // direct satisfier (err < epsilon)
      std::vector<Candidate> cells;  // near misses worth polishing
      Candidate best;
    };
    std::vector<ChunkOut> outs(n_chunks);
    const double slack = 0.5 * pitch * a_max;
    const double cut = std::min(1.0, epsilon + slack);

    const double* ap = a.data();
    const double* xp = xi.data();
    const std::size_t K = a.size();
    parallel_chunks(n_chunks, [&](std::size_t ci) {
      ChunkOut& out = outs[ci];
      const std::uint64_t j0 = ci * kChunk;
      const std::uint64_t j1 = std::min<std::uint64_t>(n_target, j0 + kChunk);
      for (std::uint64_t j = j0; j < j1; ++j) {
        const double w = w_base + double(j + j_offset) * pitch;
        double m = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          const double t = w * ap[k];
          const double v = std::fabs(std::fabs(t - 2.0 * std::floor((t + 1.0) * 0.5)) - xp[k]);
          if (v > m) {
            m = v;
            if (m >= cut) break;
          }
        }
        if (m < cut) {
          if (m < out.best.err) out.best = {j, w, m};
          if (m < epsilon && out.hit.err >= epsilon) out.hit = {j, w, m};
          if (out.cells.size() < 64) out.cells.push_back({j, w, m});
        }
      }
    });
    used += n_target;
    bound_reached =
        std::max(bound_reached, w_base + double(n_target ? n_target - 1 + j_offset : 0) * pitch);

    // deterministic merge in chunk order
    for (std::size_t ci = 0; ci < n_chunks; ++ci) {
      if (outs[ci].hit.err < epsilon) return finalize(outs[ci].hit.w, true);
      for (const Candidate& cell : outs[ci].cells) {
        Candidate p = polish(a, xi, cell.w, pitch, &used);
        if (p.err < best.max_error) {
          best.w = p.w;
          best.max_error = p.err;
        }
        if (p.err < epsilon) return finalize(p.w, true);
      }
      if (outs[ci].best.err < best.max_error) {
        best.w = outs[ci].best.w;
        best.max_error = outs[ci].best.err;
      }
    }
  }

  // Nothing satisfied the tolerance.  If no sub-threshold candidate was ever
  // recorded, take an honest best from a small full-residual sweep.
  if (!std::isfinite(best.max_error)) {
    for (std::uint64_t i = 0; i < 4096; ++i) {
      const double w = double(i) * pitch_floor;
      const double e = residual(a, xi, w);
      if (e < best.max_error) {
        best.w = w;
        best.max_error = e;
      }
    }
  }
  return finalize(best.w, false);
}

std::pair<double, long long> shift_nonneg(const FitResult& result) {
  const long long m0 = static_cast<long long>(std::floor(std::fabs(result.w))) + 1;
  return {result.w, m0};
}

double winding_coverage(int K, std::uint64_t samples, double range, double alpha,
                        const std::vector<double>& offsets) {
  if (K < 1 || K > 4) throw validation_error("winding_coverage: K must lie in 1..4");
  if (samples < 1) throw validation_error("winding_coverage: samples must be >= 1");
  if (!(range > 0.0)) throw validation_error("winding_coverage: range must be positive");
  std::vector<double> a(K);
  for (int k = 0; k < K; ++k) {
    const double r = offsets.empty() ? double(k + 1) : offsets[k];
    if (alpha + r == 0.0) throw validation_error("winding_coverage: alpha + offset is zero");
    a[k] = 1.0 / (alpha + r);
  }
  constexpr int kBits = 5;  // 32 cells per coordinate
  const std::size_t n_cells = std::size_t(1) << (kBits * K);
  std::vector<bool> seen(n_cells, false);
  const double pitch = range / double(samples);
  std::size_t visited = 0;
  for (std::uint64_t i = 1; i <= samples; ++i) {
    const double w = double(i) * pitch;
    std::size_t idx = 0;
    for (int k = 0; k < K; ++k) {
      const double t = w * a[k];
      double frac = t - std::floor(t);
      int cell = static_cast<int>(frac * 32.0);
      cell = std::clamp(cell, 0, 31);
      idx = (idx << kBits) | static_cast<std::size_t>(cell);
    }
    if (!seen[idx]) {
      seen[idx] = true;
      ++visited;
    }
  }
  return double(visited) / double(n_cells);
}

}  // namespace euaf::pointfit
