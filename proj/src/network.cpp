#include "hsnn/network.hpp"

#include <cmath>

#include "hsnn/rng.hpp"

namespace hsnn {

void NetworkSpec::validate() const {
  require(layer_sizes.size() >= 2, "NetworkSpec: need at least input and one neuron layer");
  for (std::size_t i = 0; i < layer_sizes.size(); ++i)
    require(layer_sizes[i] > 0, "NetworkSpec: layer size must be positive");
  require(std::isfinite(delta_t) && delta_t > 0.0, "NetworkSpec: delta_t must be positive");
  require(std::isfinite(current_scale) && current_scale > 0.0,
          "NetworkSpec: current_scale must be positive");
}

void Network::validate() const {
  spec.validate();
  const int L = spec.num_weight_layers();
  require(static_cast<int>(weights.size()) == L && static_cast<int>(params.size()) == L,
          "Network: weight/parameter layer count mismatch with spec");
  for (int l = 0; l < L; ++l) {
    require(weights[l].rows() == spec.layer_sizes[l + 1] &&
                weights[l].cols() == spec.layer_sizes[l],
            "Network: weight matrix shape mismatch at layer " + std::to_string(l));
    require(weights[l].allFinite(), "Network: non-finite weight at layer " + std::to_string(l));
    require(params[l].size() == spec.layer_sizes[l + 1],
            "Network: parameter table size mismatch at layer " + std::to_string(l));
    params[l].validate();
  }
}

Network Network::make(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  Network net;
  net.spec = spec;
  const int L = spec.num_weight_layers();
  net.weights.resize(L);
  net.params.reserve(L);
  for (int l = 0; l < L; ++l) net.params.push_back(NeuronParams::defaults(spec.layer_sizes[l + 1], spec.delta_t));
  init_weights(net, seed);
  return net;
}

void init_weights(Network& net, std::uint64_t seed) {
  const int L = net.spec.num_weight_layers();
  net.weights.resize(L);
  for (int l = 0; l < L; ++l) {
    const int rows = net.spec.layer_sizes[l + 1];
    const int cols = net.spec.layer_sizes[l];
    Rng rng(derive_key({seed, 0x57454947u /* "WEIG" */, static_cast<std::uint64_t>(l)}));
    const double stddev = 1.0 / std::sqrt(static_cast<double>(cols));
    Matrix w(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) w(i, j) = stddev * rng.normal();
    net.weights[l] = std::move(w);
  }
}

namespace {

int props_per_layer(const NeuronParams& p, const TrainableMask& mask) {
  return mask.count() * p.size();
}

void check_regime(const TrainableMask& mask, bool train_weights) {
  require(!(train_weights && mask.count() > 0),
          "genome: optimizing neuron properties and weights together is not supported");
  require(train_weights || mask.count() > 0, "genome: nothing selected for optimization");
}

}  // namespace

int genome_size(const Network& net, const TrainableMask& mask, bool train_weights) {
  check_regime(mask, train_weights);
  int n = 0;
  for (const auto& p : net.params) n += props_per_layer(p, mask);
  if (train_weights)
    for (const auto& w : net.weights) n += static_cast<int>(w.size());
  return n;
}

Genome pack_genome(const Network& net, const TrainableMask& mask, bool train_weights) {
  Genome g(genome_size(net, mask, train_weights));
  int at = 0;
  auto put = [&](const Array& a) {
    g.segment(at, a.size()) = a.matrix();
    at += static_cast<int>(a.size());
  };
  for (const auto& p : net.params) {
    if (mask.tau_raw) put(p.tau_raw);
    if (mask.v_th) put(p.v_th);
    if (mask.v_rest) put(p.v_rest);
    if (mask.r_mem) put(p.r_mem / kRmemGenomeScale);
  }
  if (train_weights)
    for (const auto& w : net.weights) {
      g.segment(at, w.size()) = Eigen::Map<const Vector>(w.data(), w.size());
      at += static_cast<int>(w.size());
    }
  return g;
}

void unpack_genome(Network& net, const Genome& genome, const TrainableMask& mask,
                   bool train_weights) {
  require(genome.size() == genome_size(net, mask, train_weights),
          "unpack_genome: genome length mismatch");
  int at = 0;
  auto take = [&](Array& a) {
    a = genome.segment(at, a.size()).array();
    at += static_cast<int>(a.size());
  };
  for (auto& p : net.params) {
    if (mask.tau_raw) take(p.tau_raw);
    if (mask.v_th) take(p.v_th);
    if (mask.v_rest) take(p.v_rest);
    if (mask.r_mem) {
      take(p.r_mem);
      p.r_mem *= kRmemGenomeScale;
    }
  }
  if (train_weights)
    for (auto& w : net.weights) {
      Eigen::Map<Vector>(w.data(), w.size()) = genome.segment(at, w.size());
      at += static_cast<int>(w.size());
    }
}

Trajectory forward(const Network& net, const std::vector<Array>& inputs) {
  const int L = net.num_layers();
  Trajectory traj;
  traj.v0.reserve(L);
  for (int l = 0; l < L; ++l) traj.v0.push_back(net.params[l].v_rest);
  traj.inputs = inputs;
  traj.steps.resize(inputs.size());

  std::vector<LayerState> state;
  state.reserve(L);
  for (int l = 0; l < L; ++l) state.push_back(LayerState::resting(net.params[l]));

  for (std::size_t t = 0; t < inputs.size(); ++t) {
    require(inputs[t].size() == net.spec.input_size(), "forward: input size mismatch");
    StepRecord& rec = traj.steps[t];
    rec.current.resize(L);
    rec.u.resize(L);
    rec.s.resize(L);
    rec.v.resize(L);
    const Array* below = &inputs[t];
    for (int l = 0; l < L; ++l) {
      rec.current[l] =
          net.spec.current_scale * (net.weights[l] * below->matrix()).array();
      LifStepResult r = lif_step(state[l], rec.current[l], net.params[l], net.layer_spikes(l));
      rec.u[l] = r.u;
      rec.s[l] = r.state.s;
      rec.v[l] = r.state.v;
      state[l] = std::move(r.state);
      below = &rec.s[l];
    }
  }
  return traj;
}

Simulation::Simulation(const Network& net) : net_(&net) {
  net.validate();
  reset();
}

void Simulation::reset() {
  states_.clear();
  states_.reserve(net_->num_layers());
  for (int l = 0; l < net_->num_layers(); ++l)
    states_.push_back(LayerState::resting(net_->params[l]));
  output_ = Array::Zero(net_->spec.output_size());
}

const Array& Simulation::step(const Array& input) {
  require(input.size() == net_->spec.input_size(), "Simulation::step: input size mismatch");
  const Array* below = &input;
  for (int l = 0; l < net_->num_layers(); ++l) {
    const Array current =
        net_->spec.current_scale * (net_->weights[l] * below->matrix()).array();
    LifStepResult r = lif_step(states_[l], current, net_->params[l], net_->layer_spikes(l));
    states_[l] = std::move(r.state);
    below = &states_[l].s;
  }
  const LayerState& top = states_.back();
  output_ = net_->spec.spiking_readout ? top.s : top.v;
  return output_;
}

}  // namespace hsnn
