#pragma once

#include <array>
#include <map>
#include <string>

namespace hsnn {

/// The four per-neuron properties, in coalition-bit order.
inline constexpr int kNumProperties = 4;
extern const std::array<const char*, kNumProperties> kPropertyNames;  // tau_m, v_th, v_rest, r_mem

/// Human-readable name of a coalition bitmask, e.g. "{tau_m,v_th}" or "{}".
std::string coalition_name(int mask);

struct ShapleyReport {
  std::array<double, kNumProperties> values{};
  std::array<double, 16> coalition_values{};  ///< indexed by bitmask
  double efficiency_residual = 0.0;           ///< sum(values) - (v(all) - v(empty))

  std::string to_csv() const;  // property,value rows
};

/// Exact Shapley attribution over the 4 properties: average marginal
/// contribution over all 24 player orderings. Every one of the 16 coalition
/// values must be present (v(empty) included; it is a modeling choice).
ShapleyReport shapley_exact(const std::map<int, double>& coalition_values);

}  // namespace hsnn
