#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "euaf/approx1d.hpp"
#include "euaf/network.hpp"

namespace euaf::approxnd {

// One-dimensional factor of a superposition decomposition.  Exact algebraic
// forms are realized with zero error inside their architecture slot; General
// runs the full interval pipeline.
struct Fn1D {
  enum class Form { Zero, Constant, Affine, Quadratic, General };
  Form form = Form::Zero;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // c0 + c1 t + c2 t^2 for exact forms
  std::function<double(double)> fn;     // General only

  static Fn1D zero() { return {}; }
  static Fn1D constant(double c) { return {Form::Constant, c, 0.0, 0.0, nullptr}; }
  static Fn1D affine(double c0, double c1) { return {Form::Affine, c0, c1, 0.0, nullptr}; }
  static Fn1D quadratic(double c0, double c1, double c2) {
    return {Form::Quadratic, c0, c1, c2, nullptr};
  }
  static Fn1D general(std::function<double(double)> f) {
    Fn1D v;
    v.form = Form::General;
    v.fn = std::move(f);
    return v;
  }

  double operator()(double t) const;
  bool is_zero() const { return form == Form::Zero; }
};

// Superposition data: f(x) = sum_i outer[i]( sum_j inner[i][j]( (x_j-a)/(b-a) ) ).
struct KstDecomposition {
  int d = 1;
  std::vector<std::vector<Fn1D>> inner;  // (2d+1) x d, arguments in [0,1]
  std::vector<Fn1D> outer;               // (2d+1), arguments on R

  void validate() const;
};

struct AssembleReport {
  double M = 0.0;      // inner normalization bound
  double delta = 0.0;  // outer continuity radius actually used
  double grid_sup_error = 0.0;
  std::size_t nonzero_params = 0;
  std::vector<pointfit::FitResult> fits;  // from any General sub-builds
};

// Fixed architecture of width 36*d*(2d+1) and depth 11; parameters unused
// by the given decomposition stay zero.  When `reference` is provided the
// report carries the sup error against it on a low-discrepancy grid.
std::pair<Network, AssembleReport> assemble(
    double a, double b, const KstDecomposition& kst, double epsilon,
    std::uint64_t budget = 1'000'000'000,
    const std::function<double(std::span<const double>)>& reference = nullptr,
    int verify_points = 10000);

// Max over a grid of |f(L1(y)) - sum_i outer_i(sum_j inner_ij(y_j))| with
// L1 the [0,1] -> [a,b] coordinate map.
double kst_sanity(const KstDecomposition& kst,
                  const std::function<double(std::span<const double>)>& f, double a,
                  double b, int grid_points = 10000);

// Built-in decompositions used by the CLI and the test suite.
KstDecomposition additive_decomposition(int d, const std::vector<double>& coeffs, double a,
                                        double b);
KstDecomposition product2_decomposition(double a, double b);
KstDecomposition trivial1d(const Fn1D& f, double a, double b);

}  // namespace euaf::approxnd
