#include "hsnn/surrogate.hpp"

#include <algorithm>
#include <cmath>

namespace hsnn {

namespace {
constexpr double kPi = 3.14159265358979323846;

double rectangular_grad(double x, double v_th) {
  return std::max(0.0, v_th - std::abs(x)) / (v_th * v_th);
}

double arctan_grad(double x, double alpha) {
  const double z = kPi / 2.0 * alpha * x;
  return alpha / 2.0 / (1.0 + z * z);
}

double log_grad(double x, double alpha) { return alpha / (1.0 + alpha * std::abs(x)); }
}  // namespace

SurrogateKind surrogate_kind_from_string(const std::string& name) {
  if (name == "rectangular") return SurrogateKind::Rectangular;
  if (name == "arctan") return SurrogateKind::Arctan;
  if (name == "log_nonzero_sign") return SurrogateKind::LogNonzeroSign;
  throw std::invalid_argument("unknown surrogate gradient '" + name +
                              "' (expected rectangular, arctan, or log_nonzero_sign)");
}

std::string to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::Rectangular: return "rectangular";
    case SurrogateKind::Arctan: return "arctan";
    case SurrogateKind::LogNonzeroSign: return "log_nonzero_sign";
  }
  return "?";
}

double surrogate_grad(const Surrogate& sg, double x, double v_th) {
  switch (sg.kind) {
    case SurrogateKind::Rectangular: return rectangular_grad(x, v_th);
    case SurrogateKind::Arctan: return arctan_grad(x, sg.alpha);
    case SurrogateKind::LogNonzeroSign: return log_grad(x, sg.alpha);
  }
  return 0.0;
}

Array surrogate_grad(const Surrogate& sg, const Array& x, const Array& v_th) {
  require(x.size() == v_th.size(), "surrogate_grad: size mismatch");
  Array out(x.size());
  for (int i = 0; i < x.size(); ++i) out[i] = surrogate_grad(sg, x[i], v_th[i]);
  return out;
}

double surrogate_value(const Surrogate& sg, double x, double v_th) {
  switch (sg.kind) {
    case SurrogateKind::Rectangular: {
      const double c = std::clamp(x, -v_th, v_th);
      return 0.5 + (v_th * c - 0.5 * c * std::abs(c)) / (v_th * v_th);
    }
    case SurrogateKind::Arctan:
      return std::atan(kPi / 2.0 * sg.alpha * x) / kPi + 0.5;
    case SurrogateKind::LogNonzeroSign: {
      const double sign = x < 0.0 ? -1.0 : 1.0;  // nonzero_sign(0) = +1
      return sign * std::log(sg.alpha * std::abs(x) + 1.0);
    }
  }
  return 0.0;
}

}  // namespace hsnn
