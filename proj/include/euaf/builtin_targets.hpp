#pragma once

#include <functional>
#include <span>
#include <string>

namespace euaf::targets {

struct BuiltinTarget {
  int dim = 1;
  std::function<double(std::span<const double>)> fn;
};

// Known names: "x", "x2", "sin3", "osc1d" (0.6 sin 8x + 0.4 sin 16x),
// "sin8" (0.6 sin 8x), "zero"; 2-D: "osc2d", "sum2", "prod2".
BuiltinTarget lookup(const std::string& name);

// Scalar view of a 1-D builtin.
std::function<double(double)> lookup1d(const std::string& name);

// Two-column CSV (x, f(x)) with at least 1000 rows; rows are sorted by x
// and evaluated by piecewise-linear interpolation.
std::function<double(double)> load_csv_target(const std::string& path, double* lo,
                                              double* hi);

}  // namespace euaf::targets
