#include "hsnn/firing.hpp"

#include "hsnn/csv.hpp"

namespace hsnn {

int total_neurons(const Trajectory& traj) {
  require(!traj.v0.empty(), "total_neurons: empty trajectory");
  int n = 0;
  for (const Array& v : traj.v0) n += static_cast<int>(v.size());
  return n;
}

FiringStats firing_stats(const std::vector<Trajectory>& trajectories,
                         const std::vector<int>& labels, int num_classes,
                         const std::vector<int>& neuron_sample) {
  require(!trajectories.empty(), "firing_stats: no trajectories");
  require(trajectories.size() == labels.size(),
          "firing_stats: trajectory and label counts differ");
  require(num_classes >= 1, "firing_stats: need at least one class");
  require(!neuron_sample.empty(), "firing_stats: empty neuron sample");

  const int ntot = total_neurons(trajectories.front());
  for (int id : neuron_sample)
    require(id >= 0 && id < ntot,
            "firing_stats: neuron id " + std::to_string(id) + " outside 0.." +
                std::to_string(ntot - 1));

  FiringStats fs;
  fs.neuron_ids = neuron_sample;
  fs.num_classes = num_classes;
  fs.freq = Matrix::Zero(static_cast<int>(neuron_sample.size()), num_classes);
  std::vector<int> class_count(num_classes, 0);

  for (std::size_t e = 0; e < trajectories.size(); ++e) {
    const Trajectory& traj = trajectories[e];
    const int label = labels[e];
    require(label >= 0 && label < num_classes,
            "firing_stats: label " + std::to_string(label) + " outside 0.." +
                std::to_string(num_classes - 1));
    require(total_neurons(traj) == ntot, "firing_stats: trajectories disagree on network size");
    require(traj.num_steps() > 0, "firing_stats: empty trajectory");
    ++class_count[label];

    // spike count per global neuron, normalized by steps
    for (std::size_t row = 0; row < neuron_sample.size(); ++row) {
      int id = neuron_sample[row];
      int layer = 0;
      while (id >= static_cast<int>(traj.v0[layer].size())) {
        id -= static_cast<int>(traj.v0[layer].size());
        ++layer;
      }
      double spikes = 0.0;
      for (int t = 0; t < traj.num_steps(); ++t) spikes += traj.steps[t].s[layer][id];
      fs.freq(static_cast<int>(row), label) += spikes / traj.num_steps();
    }
  }

  for (int c = 0; c < num_classes; ++c) {
    require(class_count[c] > 0,
            "firing_stats: class " + std::to_string(c) + " has no trajectories");
    fs.freq.col(c) /= class_count[c];
  }
  return fs;
}

std::string FiringStats::to_csv() const {
  std::string out = "neuron";
  for (int c = 0; c < num_classes; ++c) out += ",class_" + std::to_string(c);
  out += "\n";
  for (int r = 0; r < freq.rows(); ++r) {
    out += std::to_string(neuron_ids[r]);
    for (int c = 0; c < num_classes; ++c) out += "," + g17(freq(r, c));
    out += "\n";
  }
  return out;
}

}  // namespace hsnn
