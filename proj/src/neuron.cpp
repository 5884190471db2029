#include "hsnn/neuron.hpp"

#include <sstream>

namespace hsnn {

NeuronParams NeuronParams::defaults(int n, double delta_t) {
  require(n > 0, "NeuronParams::defaults: layer size must be positive");
  NeuronParams p;
  p.tau_raw = Array::Constant(n, tau_raw_for(kDefaultTauM, delta_t));
  p.v_th = Array::Constant(n, kDefaultVth);
  p.v_rest = Array::Constant(n, kDefaultVrest);
  p.r_mem = Array::Constant(n, kDefaultRmem);
  p.delta_t = delta_t;
  return p;
}

void NeuronParams::validate() const {
  const int n = size();
  require(n > 0, "NeuronParams: empty parameter table");
  require(v_th.size() == n && v_rest.size() == n && r_mem.size() == n,
          "NeuronParams: field sizes disagree");
  require(std::isfinite(delta_t) && delta_t > 0.0, "NeuronParams: delta_t must be positive");
  auto check = [&](const Array& a, const char* name) {
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(a[i])) {
        std::ostringstream msg;
        msg << "NeuronParams: " << name << "[" << i << "] is not finite (" << a[i] << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  };
  check(tau_raw, "tau_raw");
  check(v_th, "v_th");
  check(v_rest, "v_rest");
  check(r_mem, "r_mem");
}

LifStepResult lif_step(const LayerState& state, const Array& input_current,
                       const NeuronParams& params, bool spiking) {
  const int n = params.size();
  require(state.v.size() == n && input_current.size() == n,
          "lif_step: state/input size mismatch with parameter table");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(input_current[i])) {
      std::ostringstream msg;
      msg << "lif_step: input current for neuron " << i << " is not finite ("
          << input_current[i] << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  const Array k = params.decay();
  LifStepResult r;
  r.u = state.v + k * (params.r_mem * input_current - state.v + params.v_rest);
  if (spiking) {
    r.state.s = (r.u >= params.v_th).cast<double>();
    r.state.v = r.u * (1.0 - r.state.s) + params.v_rest * r.state.s;
  } else {
    r.state.s = Array::Zero(n);
    r.state.v = r.u;
  }
  return r;
}

}  // namespace hsnn
