#pragma once

#include <string>

#include "hsnn/types.hpp"

namespace hsnn {

/// Smoothed pseudo-derivative used in place of the spike Heaviside when
/// differentiating through the threshold.
enum class SurrogateKind {
  Rectangular,    ///< g'(x) = max(0, v_th - |x|) / v_th^2 (width set by the neuron's own threshold)
  Arctan,         ///< g(x) = (1/pi) atan(pi/2 alpha x) + 1/2
  LogNonzeroSign  ///< g(x) = nonzero_sign(x) log(alpha |x| + 1)
};

struct Surrogate {
  SurrogateKind kind = SurrogateKind::Rectangular;
  double alpha = 2.0;  // sharpness; ignored by Rectangular
};

SurrogateKind surrogate_kind_from_string(const std::string& name);
std::string to_string(SurrogateKind kind);

/// Pseudo-derivative g'(x) at x = u - v_th. `v_th` is only read by the
/// rectangular shape, whose support is [-v_th, v_th].
double surrogate_grad(const Surrogate& sg, double x, double v_th);
Array surrogate_grad(const Surrogate& sg, const Array& x, const Array& v_th);

/// Antiderivative of surrogate_grad with g(-inf) = 0 for the two bounded
/// shapes; LogNonzeroSign is odd with g(0) = 0 and nonzero_sign(0) = +1.
/// Used by tests to check grad == d/dx value by finite differences.
double surrogate_value(const Surrogate& sg, double x, double v_th);

}  // namespace hsnn
