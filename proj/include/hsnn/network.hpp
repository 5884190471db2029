#pragma once

#include <cstdint>
#include <vector>

#include "hsnn/neuron.hpp"
#include "hsnn/types.hpp"

namespace hsnn {

/// Which per-neuron properties a genome exposes to the optimizer.
struct TrainableMask {
  bool tau_raw = true;
  bool v_th = true;
  bool v_rest = true;
  bool r_mem = true;

  int count() const { return int(tau_raw) + int(v_th) + int(v_rest) + int(r_mem); }
  static TrainableMask none() { return {false, false, false, false}; }
  static TrainableMask all() { return {true, true, true, true}; }
};

struct NetworkSpec {
  std::vector<int> layer_sizes;       ///< including the input layer; >= 2 entries
  double delta_t = kDefaultDeltaT;
  double current_scale = 2e-8;        ///< amperes of input current per unit weighted spike sum
  bool spiking_readout = false;       ///< readout integrates its potential without firing by default

  int num_weight_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  void validate() const;
};

/// Feedforward LIF network. weights[l] maps layer l activity (input for l = 0)
/// to layer l+1 input currents; params[l] holds layer l+1's neuron table.
struct Network {
  NetworkSpec spec;
  std::vector<Matrix> weights;
  std::vector<NeuronParams> params;

  int num_layers() const { return static_cast<int>(weights.size()); }
  bool layer_spikes(int l) const {
    return l + 1 < num_layers() || spec.spiking_readout;
  }
  void validate() const;

  /// Default parameter tables plus LeCun-normal weights, N(0, 1/fan_in).
  static Network make(const NetworkSpec& spec, std::uint64_t seed);
};

/// Draw every weight matrix afresh; deterministic in (seed, layer index).
void init_weights(Network& net, std::uint64_t seed);

// ---- Genome packing -------------------------------------------------------
// Layout: for each non-input layer, the property blocks present in the mask,
// in tau_raw, v_th, v_rest, r_mem order, each block one layer-sized array.
// With train_weights the flattened weight matrices (column-major, layer by
// layer) follow instead; optimizing properties and weights together is
// rejected so the two training regimes stay comparable.
//
// Genome entries must share a common O(1) scale for isotropic ES noise and a
// single learning rate to mean anything: tau is already reparameterized, and
// the membrane resistance (order 5e7 ohm) is packed in units of 2^26 ohm.
// A power of two keeps both directions of the scaling exact, so genomes
// still round-trip bit-for-bit.
inline constexpr double kRmemGenomeScale = 67108864.0;  // 2^26

int genome_size(const Network& net, const TrainableMask& mask, bool train_weights);
Genome pack_genome(const Network& net, const TrainableMask& mask, bool train_weights);
void unpack_genome(Network& net, const Genome& genome, const TrainableMask& mask,
                   bool train_weights);

// ---- Forward simulation ----------------------------------------------------

/// Everything one step produced, kept per layer for the backward pass.
struct StepRecord {
  std::vector<Array> current;  ///< input current in amperes
  std::vector<Array> u;        ///< pre-reset potential
  std::vector<Array> s;        ///< spikes
  std::vector<Array> v;        ///< post-reset potential
};

struct Trajectory {
  std::vector<Array> v0;       ///< initial potentials per layer
  std::vector<Array> inputs;   ///< network input at each step
  std::vector<StepRecord> steps;

  int num_steps() const { return static_cast<int>(steps.size()); }
  /// Post-reset potential of layer l entering step t.
  const Array& v_prev(int t, int l) const { return t == 0 ? v0[l] : steps[t - 1].v[l]; }
  /// Activity feeding layer l at step t: spikes of layer l-1, or the raw input.
  const Array& source(int t, int l) const { return l == 0 ? inputs[t] : steps[t].s[l - 1]; }
};

/// Run the network for inputs.size() steps from rest. Input flows through the
/// whole depth within a step: layer l at step t sees layer l-1's step-t spikes.
Trajectory forward(const Network& net, const std::vector<Array>& inputs);

/// Stateful step-by-step runner for closed-loop control.
class Simulation {
 public:
  explicit Simulation(const Network& net);

  void reset();
  /// Advance one step; returns the readout layer's observable activity
  /// (membrane potential, or spikes when the readout fires).
  const Array& step(const Array& input);
  const std::vector<LayerState>& states() const { return states_; }

 private:
  const Network* net_;
  std::vector<LayerState> states_;
  Array output_;
};

}  // namespace hsnn
