#pragma once

#include <algorithm>
#include <cmath>

#include "hsnn/types.hpp"

namespace hsnn {

// Default neuron constants: dt = 5 ms, tau_m = 20 ms, v_th = 0.5 V,
// v_rest = 0 V, R = 5e7 ohm.
constexpr double kDefaultDeltaT = 0.005;
constexpr double kDefaultTauM = 0.020;
constexpr double kDefaultVth = 0.5;
constexpr double kDefaultVrest = 0.0;
constexpr double kDefaultRmem = 5e7;

/// Numerically stable logistic sigmoid.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Decay factor for one raw value; see NeuronParams::decay for the clamp.
inline double decay_of(double tau_raw) {
  return std::clamp(sigmoid(tau_raw), 1e-12, 1.0 - 1e-12);
}

/// Raw (unconstrained) parameter whose sigmoid is the decay factor dt/tau_m.
inline double tau_raw_for(double tau_m, double delta_t = kDefaultDeltaT) {
  return logit(delta_t / tau_m);
}

/// Per-neuron heterogeneous properties for one layer, stored column-wise.
/// The membrane time constant is parameterized indirectly: the decay factor
/// k = sigmoid(tau_raw) = dt/tau_m lies in (0,1) for any finite tau_raw, so
/// the Euler step stays stable for every genome value.
struct NeuronParams {
  Array tau_raw;
  Array v_th;
  Array v_rest;
  Array r_mem;
  double delta_t = kDefaultDeltaT;

  int size() const { return static_cast<int>(tau_raw.size()); }

  /// Decay factor k = dt/tau_m, elementwise in (0,1). The sigmoid saturates
  /// to exactly 0/1 in double precision around |tau_raw| > 37, so the result
  /// is nudged back inside the open interval to keep the leak a strict
  /// contraction for every finite genome value.
  Array decay() const { return tau_raw.unaryExpr([](double x) { return decay_of(x); }); }

  /// Effective membrane time constant in seconds (> dt always).
  Array tau_m() const { return delta_t / decay(); }

  static NeuronParams defaults(int n, double delta_t = kDefaultDeltaT);

  /// Throws if any field is non-finite or sizes disagree; diagnostics name
  /// the offending neuron index.
  void validate() const;
};

/// Post-reset membrane potentials and last-step spikes of one layer.
struct LayerState {
  Array v;
  Array s;

  static LayerState resting(const NeuronParams& p) { return {p.v_rest, Array::Zero(p.size())}; }
};

struct LifStepResult {
  LayerState state;
  Array u;  // pre-reset potential, kept for gradient computation
};

/// One Euler step of the discretized LIF dynamics:
///   u = v_prev + k (R I - v_prev + v_rest),   k = dt/tau_m
///   s = heaviside(u - v_th)
///   v = u (1 - s) + v_rest s          (v_reset == v_rest)
/// `input_current` is the already-weighted spike sum, in amperes.
/// Non-spiking layers (readout) skip the threshold entirely: s = 0, v = u.
LifStepResult lif_step(const LayerState& state, const Array& input_current,
                       const NeuronParams& params, bool spiking = true);

}  // namespace hsnn
