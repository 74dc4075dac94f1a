#include "euaf/builtin_targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "euaf/network.hpp"

namespace euaf::targets {

BuiltinTarget lookup(const std::string& name) {
  if (name == "x") return {1, [](std::span<const double> v) { return v[0]; }};
  if (name == "x2") return {1, [](std::span<const double> v) { return v[0] * v[0]; }};
  if (name == "sin3")
    return {1, [](std::span<const double> v) { return std::sin(3.0 * v[0]); }};
  if (name == "osc1d")
    return {1, [](std::span<const double> v) {
              return 0.6 * std::sin(8.0 * v[0]) + 0.4 * std::sin(16.0 * v[0]);
            }};
  if (name == "sin8")
    return {1, [](std::span<const double> v) { return 0.6 * std::sin(8.0 * v[0]); }};
  if (name == "zero") return {1, [](std::span<const double>) { return 0.0; }};
  if (name == "osc2d")
    return {2, [](std::span<const double> v) {
              return 0.6 * std::sin(8.0 * v[0]) + 0.4 * std::sin(16.0 * v[1]);
            }};
  if (name == "sum2")
    return {2, [](std::span<const double> v) { return v[0] + v[1]; }};
  if (name == "prod2")
    return {2, [](std::span<const double> v) { return v[0] * v[1]; }};
  throw validation_error("unknown builtin target: " + name);
}

std::function<double(double)> lookup1d(const std::string& name) {
  BuiltinTarget t = lookup(name);
  if (t.dim != 1) throw validation_error("builtin target is not one-dimensional: " + name);
  auto fn = t.fn;
  return [fn](double x) {
    const double v[1] = {x};
    return fn(v);
  };
}

std::function<double(double)> load_csv_target(const std::string& path, double* lo,
                                              double* hi) {
  std::ifstream ifs(path);
  if (!ifs) throw validation_error("cannot open sample file: " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(ifs, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double x, y;
    if (is >> x >> y) rows.push_back({x, y});
  }
  if (rows.size() < 1000)
    throw validation_error("sample file needs at least 1000 rows");
  std::sort(rows.begin(), rows.end());
  if (lo) *lo = rows.front().first;
  if (hi) *hi = rows.back().first;
  return [rows](double x) {
    if (x <= rows.front().first) return rows.front().second;
    if (x >= rows.back().first) return rows.back().second;
    auto it = std::lower_bound(rows.begin(), rows.end(), std::pair<double, double>{x, -1e300});
    const auto [x1, y1] = *it;
    const auto [x0, y0] = *(it - 1);
    const double t = x1 == x0 ? 0.0 : (x - x0) / (x1 - x0);
    return y0 + t * (y1 - y0);
  };
}

}  // namespace euaf::targets
