#include "euaf/activation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "euaf/uaf_variants.hpp"

namespace euaf {

namespace {

void check_finite(double x) {
  if (!std::isfinite(x)) throw std::domain_error("activation input must be finite");
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

ActivationKind ActivationKind::ramp(double eta0) {
  if (!(eta0 > 0.0 && eta0 < 1.0))
    throw std::domain_error("ramp eta0 must lie in (0,1)");
  return {Act::Ramp, eta0, 0};
}

ActivationKind ActivationKind::smooth(int s) {
  if (s < 1 || s > uaf::kMaxSmoothDepth)
    throw std::domain_error("smooth depth s must lie in 1..4");
  return {Act::SmoothUaf, 0.0, s};
}

double tri_wave(double x) {
  return std::fabs(x - 2.0 * std::floor((x + 1.0) * 0.5));
}

double softsign(double x) { return x / (std::fabs(x) + 1.0); }

double eval(const ActivationKind& kind, double x) {
  check_finite(x);
  switch (kind.tag) {
    case Act::Euaf:
      return x >= 0.0 ? tri_wave(x) : softsign(x);
    case Act::TriWave:
      return tri_wave(x);
    case Act::Softsign:
      return softsign(x);
    case Act::Step:
      return x - (x >= 0.0 ? tri_wave(x) : softsign(x));
    case Act::Snap: {
      const double y = x + 1.5;
      return x + 0.5 - (y >= 0.0 ? tri_wave(y) : softsign(y));
    }
    case Act::Ramp:
      return (relu(x) - relu(x - kind.eta0)) / kind.eta0;
    case Act::ReLU:
      return relu(x);
    case Act::Identity:
      return x;
    case Act::SigmoidalUaf:
      return uaf::eval_sigmoidal(x);
    case Act::SmoothUaf:
      return uaf::eval_smooth(kind.s, x);
  }
  throw std::logic_error("unknown activation tag");
}

namespace {

// Right-hand slope of the triangular wave: +1 on [2m, 2m+1), -1 on [2m+1, 2m+2).
double tri_wave_subgradient(double x) {
  const double m = std::floor((x + 1.0) * 0.5);
  return x - 2.0 * m >= 0.0 ? 1.0 : -1.0;
}

double softsign_derivative(double x) {
  const double d = std::fabs(x) + 1.0;
  return 1.0 / (d * d);
}

double euaf_subgradient(double x) {
  return x >= 0.0 ? tri_wave_subgradient(x) : softsign_derivative(x);
}

}  // namespace

double subgradient(const ActivationKind& kind, double x) {
  check_finite(x);
  switch (kind.tag) {
    case Act::Euaf:
      return euaf_subgradient(x);
    case Act::TriWave:
      return tri_wave_subgradient(x);
    case Act::Softsign:
      return softsign_derivative(x);
    case Act::Step:
      return 1.0 - euaf_subgradient(x);
    case Act::Snap:
      return 1.0 - euaf_subgradient(x + 1.5);
    case Act::Ramp:
      if (x < 0.0 || x >= kind.eta0) return 0.0;
      return 1.0 / kind.eta0;
    case Act::ReLU:
      return x >= 0.0 ? 1.0 : 0.0;
    case Act::Identity:
      return 1.0;
    case Act::SigmoidalUaf:
      return uaf::sigmoidal_derivative(x);
    case Act::SmoothUaf:
      return uaf::smooth_derivative(kind.s, x);
  }
  throw std::logic_error("unknown activation tag");
}

namespace {

// Integers in [lo, hi] at or above `first`, pushed into out.
void push_integer_knots(double lo, double hi, double first, std::vector<double>* out) {
  double k = std::max(first, std::ceil(lo));
  for (; k <= hi; k += 1.0) out->push_back(k);
}

}  // namespace

std::vector<double> breakpoints(const ActivationKind& kind, double lo, double hi) {
  if (lo > hi) throw std::domain_error("breakpoints: lo must not exceed hi");
  std::vector<double> out;
  switch (kind.tag) {
    case Act::Euaf:
    case Act::Step:
    case Act::SigmoidalUaf:
    case Act::SmoothUaf:
      // smooth on (-inf, 0); kinks (or higher-derivative jumps) at 0,1,2,...
      push_integer_knots(lo, hi, 0.0, &out);
      break;
    case Act::TriWave:
      push_integer_knots(lo, hi, -std::numeric_limits<double>::infinity(), &out);
      break;
    case Act::Softsign:
      if (lo <= 0.0 && 0.0 <= hi) out.push_back(0.0);
      break;
    case Act::Snap: {
      // kinks where x + 3/2 hits a nonnegative integer
      double k = std::max(std::ceil(lo + 1.5), 0.0);
      for (; k - 1.5 <= hi; k += 1.0)
        if (k - 1.5 >= lo) out.push_back(k - 1.5);
      break;
    }
    case Act::Ramp:
      if (lo <= 0.0 && 0.0 <= hi) out.push_back(0.0);
      if (lo <= kind.eta0 && kind.eta0 <= hi) out.push_back(kind.eta0);
      break;
    case Act::ReLU:
      if (lo <= 0.0 && 0.0 <= hi) out.push_back(0.0);
      break;
    case Act::Identity:
      break;
  }
  return out;
}

std::string to_string(const ActivationKind& kind) {
  switch (kind.tag) {
    case Act::Euaf: return "euaf";
    case Act::TriWave: return "triwave";
    case Act::Softsign: return "softsign";
    case Act::Step: return "step";
    case Act::Snap: return "snap";
    case Act::ReLU: return "relu";
    case Act::Identity: return "identity";
    case Act::SigmoidalUaf: return "sigmoidal";
    case Act::Ramp: {
      std::ostringstream os;
      os.precision(17);
      os << "ramp(" << kind.eta0 << ")";
      return os.str();
    }
    case Act::SmoothUaf: {
      std::ostringstream os;
      os << "smooth(" << kind.s << ")";
      return os.str();
    }
  }
  throw std::logic_error("unknown activation tag");
}

ActivationKind activation_from_string(const std::string& name) {
  if (name == "euaf") return ActivationKind::euaf();
  if (name == "triwave") return ActivationKind::tri_wave();
  if (name == "softsign") return ActivationKind::softsign();
  if (name == "step") return ActivationKind::step();
  if (name == "snap") return ActivationKind::snap();
  if (name == "relu") return ActivationKind::relu();
  if (name == "identity") return ActivationKind::identity();
  if (name == "sigmoidal") return ActivationKind::sigmoidal();
  if (name.rfind("ramp(", 0) == 0 && name.back() == ')')
    return ActivationKind::ramp(std::stod(name.substr(5, name.size() - 6)));
  if (name.rfind("smooth(", 0) == 0 && name.back() == ')')
    return ActivationKind::smooth(std::stoi(name.substr(7, name.size() - 8)));
  throw std::domain_error("unknown activation name: " + name);
}

}  // namespace euaf
