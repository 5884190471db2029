#pragma once

#include <string>
#include <vector>

#include "hsnn/network.hpp"

namespace hsnn {

/// Per-neuron, per-class mean spike frequency (spikes per step, averaged over
/// the trajectories of each class). Neurons are addressed by a global index
/// over all non-input layers, in layer order.
struct FiringStats {
  std::vector<int> neuron_ids;
  int num_classes = 0;
  Matrix freq;  ///< sampled neuron x class

  std::string to_csv() const;
};

/// Total number of non-input neurons a trajectory covers.
int total_neurons(const Trajectory& traj);

FiringStats firing_stats(const std::vector<Trajectory>& trajectories,
                         const std::vector<int>& labels, int num_classes,
                         const std::vector<int>& neuron_sample);

}  // namespace hsnn
